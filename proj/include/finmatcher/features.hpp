#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "finmatcher/dataset.hpp"
#include "finmatcher/embeddings.hpp"
#include "finmatcher/kgstore.hpp"
#include "finmatcher/linking.hpp"

namespace finmatcher {

inline constexpr std::size_t kNumGroups = 5;
inline constexpr std::size_t kSignalSize = kNumGroups * kNumClasses;

/// Feature groups in signal order; group g occupies [10g, 10g + 10).
enum class FeatureGroup : int {
  Overlap = 0,
  Wikidata = 1,
  WordNet = 2,
  WebIsALodHypernyms = 3,
  WebIsALodRdf2vec = 4,
};

inline constexpr std::array<FeatureGroup, kNumGroups> kAllGroups = {
    FeatureGroup::Overlap, FeatureGroup::Wikidata, FeatureGroup::WordNet, FeatureGroup::WebIsALodHypernyms,
    FeatureGroup::WebIsALodRdf2vec,
};

constexpr std::size_t index_of(FeatureGroup group) { return static_cast<std::size_t>(group); }
/// Human-readable name used in reports ("Word Overlap", "ALOD RDF2vec", ...).
std::string_view group_display_name(FeatureGroup group);

/// One value per class, indexed by class index.
using ClassVector = std::array<double, kNumClasses>;
using SignalVector = std::array<double, kSignalSize>;

constexpr std::size_t signal_index(FeatureGroup group, ClassLabel label) {
  return index_of(group) * kNumClasses + index_of(label);
}

ClassVector group_slice(const SignalVector& signal, FeatureGroup group);
void set_group_slice(SignalVector& signal, FeatureGroup group, const ClassVector& values);

/// Maximum upward hops per lookup graph.
int lookup_max_hops(Graph graph);

/// Background resources. Any member may be absent; its groups then stay zero.
struct FeatureResources {
  std::optional<KgSnapshot> wordnet;
  std::optional<KgSnapshot> wikidata;
  std::optional<KgSnapshot> webisalod;
  std::optional<EmbeddingStore> embeddings;
  StopwordSet stopwords = default_stopwords();

  const KgSnapshot* snapshot(Graph graph) const;
};

/// Class-label link sets per graph, computed once per run.
class ClassLinkTable {
 public:
  ClassLinkTable() = default;
  static ClassLinkTable build(const FeatureResources& resources);

  const LinkSet& links(ClassLabel label, Graph graph) const;
  void set(ClassLabel label, Graph graph, LinkSet links);

 private:
  std::array<std::array<LinkSet, 3>, kNumClasses> table_{};
};

ClassVector overlap_feature(std::string_view term);

/// Entry c is 1/h for the fewest hops h from any linked term concept to any
/// concept of class c's link set, 0 when none is reached within max_hops.
ClassVector lookup_feature(std::string_view term, const KgSnapshot& snapshot, const ClassLinkTable& class_links,
                           int max_hops, const StopwordSet& stopwords = default_stopwords());
ClassVector lookup_feature(const LinkSet& term_links, const KgSnapshot& snapshot, const ClassLinkTable& class_links,
                           int max_hops);

ClassVector rdf2vec_feature(std::string_view term, const KgSnapshot& snapshot, const EmbeddingStore& store,
                            const ClassLinkTable& class_links, const StopwordSet& stopwords = default_stopwords());
ClassVector rdf2vec_feature(const LinkSet& term_links, const EmbeddingStore& store, const ClassLinkTable& class_links);

struct ExtractionDiagnostics {
  std::size_t terms = 0;
  /// Terms with at least one link, per graph (WordNet, Wikidata, WebIsALOD order).
  std::array<std::size_t, 3> linked_terms{};
  /// Terms linked in WebIsALOD with at least one stored vector.
  std::size_t embedded_terms = 0;
  /// Per group, how many terms got a zero vector because resources were missing.
  std::array<std::size_t, kNumGroups> missing_resource{};

  void merge(const ExtractionDiagnostics& other);
  std::string summary() const;
};

class FeatureExtractor {
 public:
  /// `resources` must outlive the extractor.
  explicit FeatureExtractor(const FeatureResources& resources);

  const ClassLinkTable& class_links() const noexcept { return class_links_; }

  SignalVector build_signal(std::string_view term, ExtractionDiagnostics* diagnostics = nullptr) const;

  /// Signals in input order. `threads` == 0 picks the hardware concurrency.
  std::vector<SignalVector> extract(std::span<const std::string> terms, ExtractionDiagnostics* diagnostics = nullptr,
                                    unsigned threads = 1) const;

 private:
  const FeatureResources* resources_;
  ClassLinkTable class_links_;
};

std::vector<std::string> terms_of(const Dataset& dataset);

/// Header `term,g0_0,...,g4_9`; one row per term.
std::string signals_to_csv(std::span<const std::string> terms, std::span<const SignalVector> signals);

struct SignalTable {
  std::vector<std::string> terms;
  std::vector<SignalVector> signals;
};
SignalTable signals_from_csv(std::string_view text, const std::string& source = "<signals>");

}  // namespace finmatcher
