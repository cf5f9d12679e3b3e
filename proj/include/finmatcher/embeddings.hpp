#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "finmatcher/kgstore.hpp"
#include "finmatcher/linking.hpp"

namespace finmatcher {

inline constexpr std::size_t kEmbeddingDim = 200;

/// Concept vectors of one declared dimension, held as 64-bit reals.
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::size_t dimension = kEmbeddingDim) : dimension_(dimension) {}

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return vectors_.size(); }
  /// Number of insertions that replaced an existing vector.
  std::size_t duplicate_count() const noexcept { return duplicates_; }

  /// Replaces any existing vector. ValidationError on dimension mismatch or a
  /// non-finite entry.
  void insert(const ConceptId& concept_id, std::vector<double> values);
  const std::vector<double>* find(const ConceptId& concept_id) const;

  /// Multiplies every stored vector by `factor`.
  void scale(double factor);

 private:
  std::size_t dimension_;
  std::map<ConceptId, std::vector<double>> vectors_;
  std::size_t duplicates_ = 0;
};

/// word2vec-style text: `token v1 ... vD` per line. An optional leading
/// `<count> <dim>` header line is accepted and checked. Tokens become WebIsALOD
/// concept ids. Duplicate tokens keep the last vector.
EmbeddingStore parse_embeddings(std::string_view text, std::size_t dimension = kEmbeddingDim,
                                const std::string& source = "<embeddings>");
EmbeddingStore load_embeddings(const std::filesystem::path& path, std::size_t dimension = kEmbeddingDim);

/// Cosine clamped to [-1, 1]; nullopt for a zero-norm input.
std::optional<double> cosine(std::span<const double> a, std::span<const double> b);

struct SimilarityStats {
  std::size_t hyponym_dropped = 0;
  std::size_t hypernym_dropped = 0;
};

/// Mean over hyponym link vectors of the best cosine against any hypernym link
/// vector. Links without a stored vector are dropped first; 0 if either side
/// ends up empty. A zero-norm pair contributes similarity 0.
double linkset_similarity(const ConceptSet& hyponym_links, const ConceptSet& hypernym_links,
                          const EmbeddingStore& store, SimilarityStats* stats = nullptr);
double linkset_similarity(const LinkSet& hyponym_links, const LinkSet& hypernym_links, const EmbeddingStore& store,
                          SimilarityStats* stats = nullptr);

}  // namespace finmatcher
