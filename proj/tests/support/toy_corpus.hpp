#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "finmatcher/dataset.hpp"

namespace finmatcher::testing {

/// Unique scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "finmatcher");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

struct ToyOptions {
  std::size_t per_class = 30;
  /// Write Wikidata/WordNet/WebIsALOD snapshots and embeddings.
  bool with_graphs = true;
  std::uint64_t seed = 11;
};

/// Three classes (Bonds, Swap, Funds); every term embeds its class name.
/// With graphs: Wikidata links each term to its class in one or two hops,
/// WebIsALOD in one, and term vectors sit near their class vector.
struct ToyCorpus {
  std::filesystem::path dataset;
  std::filesystem::path wikidata_triples, wikidata_labels;
  std::filesystem::path wordnet_triples, wordnet_labels;
  std::filesystem::path webisalod_triples;
  std::filesystem::path embeddings;
  std::filesystem::path config;
  std::vector<TermRecord> records;

  /// Resource flags for the CLI (empty paths omitted).
  std::vector<std::string> resource_args() const;
};

ToyCorpus write_toy_corpus(const std::filesystem::path& dir, const ToyOptions& options = {});

std::vector<ClassLabel> toy_classes();

}  // namespace finmatcher::testing
