#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace finmatcher {

struct Triple {
  std::string subject;
  std::string predicate;
  std::string object;

  bool operator==(const Triple&) const = default;
};

/// Sends `query` to `endpoint` and returns the raw SPARQL JSON results body.
using SparqlTransport = std::function<std::string(const std::string& endpoint, const std::string& query)>;

/// HTTP(S) GET transport requesting application/sparql-results+json.
std::string http_sparql_transport(const std::string& endpoint, const std::string& query);

/// Lower-case hex SHA-256 of `key`.
std::string hex_digest(std::string_view key);

/// Replaces every `{id}` in the template with the part of `key` after its last
/// ':' (the whole key when it has none) and every `{key}` with the full key.
std::string render_query(std::string_view query_template, std::string_view key);

/// Reads s/p/o bindings from a SPARQL JSON result. IRIs are reduced to their
/// last path or fragment segment. A missing `s` binding takes `default_subject`.
std::vector<Triple> parse_sparql_results(std::string_view json_text, std::string_view default_subject = {});

/// One file per key, named by the key's hex digest. Writes go through an
/// atomic rename, so concurrent readers see either nothing or a full entry.
class SparqlCache {
 public:
  /// Creates the directory if it does not exist; IoError if that fails.
  explicit SparqlCache(std::filesystem::path directory);

  const std::filesystem::path& directory() const noexcept { return directory_; }
  std::filesystem::path path_for(std::string_view key) const;

  /// nullopt on a miss; CacheError when the entry exists but is unreadable or
  /// was written for a different key.
  std::optional<std::vector<Triple>> load(std::string_view key) const;
  void store(std::string_view key, const std::vector<Triple>& triples) const;

 private:
  std::filesystem::path directory_;
};

struct FetchOptions {
  bool allow_network = false;
  /// Ignore an existing entry and fetch again (used to recover from CacheError).
  bool refresh = false;
  SparqlTransport transport = http_sparql_transport;
};

/// Cache hit: returns the stored triples without touching the transport.
/// Miss: runs the rendered query, stores the result, returns it.
/// FetchError when the transport is needed but disabled or fails.
std::vector<Triple> sparql_fetch_and_cache(const std::string& endpoint, std::string_view query_template,
                                           std::string_view key, const SparqlCache& cache,
                                           const FetchOptions& options = {});

/// Triples as `subject<TAB>predicate<TAB>object` lines, importable as a snapshot.
std::string triples_to_tsv(const std::vector<Triple>& triples);

}  // namespace finmatcher
