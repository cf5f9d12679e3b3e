#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace finmatcher {

inline constexpr std::size_t kNumClasses = 10;

/// The closed set of hypernym classes. Values are the fixed class indices.
enum class ClassLabel : int {
  EquityIndex = 0,
  CreditIndex = 1,
  Bonds = 2,
  Swap = 3,
  Option = 4,
  Funds = 5,
  Future = 6,
  MMIs = 7,
  Stocks = 8,
  Forward = 9,
};

inline constexpr std::array<ClassLabel, kNumClasses> kAllClasses = {
    ClassLabel::EquityIndex, ClassLabel::CreditIndex, ClassLabel::Bonds, ClassLabel::Swap,
    ClassLabel::Option,      ClassLabel::Funds,       ClassLabel::Future, ClassLabel::MMIs,
    ClassLabel::Stocks,      ClassLabel::Forward,
};

constexpr std::size_t index_of(ClassLabel label) { return static_cast<std::size_t>(label); }

/// Throws ValidationError when `index` >= kNumClasses.
ClassLabel class_from_index(std::size_t index);

std::string_view canonical_name(ClassLabel label);

/// Case-insensitive exact match against the canonical names.
std::optional<ClassLabel> parse_class_label(std::string_view text);

/// Lower-cases, trims, collapses internal whitespace to single spaces and
/// strips one plural "s" from the final token. The final token keeps its "s"
/// when it would drop below two characters or when it ends in "ss".
std::string normalize_label(std::string_view text);

struct TermRecord {
  std::string term;
  std::optional<ClassLabel> gold;

  bool operator==(const TermRecord&) const = default;
};

enum class DatasetFormat { Json, Csv };

class Dataset {
 public:
  Dataset() = default;
  /// Throws ValidationError if any term is empty after trimming.
  explicit Dataset(std::vector<TermRecord> records);

  const std::vector<TermRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  const std::array<std::size_t, kNumClasses>& label_counts() const noexcept { return counts_; }
  std::size_t count(ClassLabel label) const noexcept { return counts_[index_of(label)]; }
  std::size_t labeled_count() const noexcept;

  /// Gold labels of all records; throws ValidationError if any record lacks one.
  std::vector<ClassLabel> golds() const;

 private:
  std::vector<TermRecord> records_;
  std::array<std::size_t, kNumClasses> counts_{};
};

/// Guesses the format from the file extension (".csv" → Csv, otherwise Json).
DatasetFormat format_for_path(const std::filesystem::path& path);

/// JSON: array of {"term", "label"} objects ("label" optional or null).
/// CSV: header `term,label`, empty label means no gold.
Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format);
Dataset parse_dataset(std::string_view text, DatasetFormat format, const std::string& source = "<dataset>");
std::string serialize_dataset(const Dataset& dataset, DatasetFormat format);

}  // namespace finmatcher
