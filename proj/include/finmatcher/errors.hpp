#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace finmatcher {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read, or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Input parsed but violates a domain rule (unknown label, bad tag, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed input. `line` is 1-based; 0 when no line applies.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A queried entity is not part of the store (distinct from a negative answer).
class NotFoundError : public Error {
 public:
  using Error::Error;
};

class FetchError : public Error {
 public:
  using Error::Error;
};

class CacheError : public Error {
 public:
  using Error::Error;
};

/// Numeric failure during training; carries where it happened.
class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, int epoch, int batch)
      : Error(what + " (epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch) + ")"),
        reason_(what),
        epoch_(epoch),
        batch_(batch) {}
  const std::string& reason() const noexcept { return reason_; }
  int epoch() const noexcept { return epoch_; }
  int batch() const noexcept { return batch_; }

 private:
  std::string reason_;
  int epoch_;
  int batch_;
};

}  // namespace finmatcher
