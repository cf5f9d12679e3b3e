#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace finmatcher {

enum class Graph { WordNet, Wikidata, WebIsALod };

std::string_view graph_name(Graph graph);
/// Accepts "wordnet", "wikidata", "webisalod" (case-insensitive); ValidationError otherwise.
Graph parse_graph(std::string_view name);

struct ConceptId {
  Graph graph;
  std::string local_id;

  auto operator<=>(const ConceptId&) const = default;
  bool operator==(const ConceptId&) const = default;
};

using ConceptSet = std::set<ConceptId>;

/// Canonical identifier form for a graph. WebIsALOD ids are lower-cased, spaces
/// become underscores and a trailing underscore is dropped; other graphs keep
/// the trimmed identifier unchanged.
std::string normalize_concept_id(Graph graph, std::string_view raw);

/// True when `predicate` (bare or prefixed, e.g. "wdt:P31" or a full IRI)
/// denotes a hypernym edge in `graph`.
bool is_hypernym_predicate(Graph graph, std::string_view predicate);

struct HopResult {
  bool found = false;
  std::optional<int> hops;

  static HopResult miss() { return {}; }
  static HopResult hit(int h) { return {true, h}; }
  bool operator==(const HopResult&) const = default;
};

/// Immutable triple/label store for one graph with a hypernym-edge index.
class KgSnapshot {
 public:
  using NodeIndex = std::uint32_t;

  class Builder {
   public:
    explicit Builder(Graph graph);
    /// Identifiers are taken as already normalized.
    NodeIndex add_node(std::string_view local_id);
    void add_edge(std::string_view child, std::string_view parent);
    /// `label` is normalized with normalize_label before indexing.
    void add_label(std::string_view local_id, std::string_view label);
    std::size_t node_count() const noexcept { return ids_.size(); }
    const std::string& id(NodeIndex node) const { return ids_.at(node); }
    KgSnapshot build() &&;

   private:
    Graph graph_;
    std::vector<std::string> ids_;
    std::unordered_map<std::string, NodeIndex> index_;
    std::vector<std::vector<NodeIndex>> parents_;
    std::unordered_map<std::string, std::vector<NodeIndex>> labels_;
  };

  explicit KgSnapshot(Graph graph) : graph_(graph) {}

  Graph graph() const noexcept { return graph_; }
  std::size_t node_count() const noexcept { return ids_.size(); }
  std::size_t edge_count() const noexcept;
  std::size_t label_count() const noexcept { return labels_.size(); }

  bool contains(const ConceptId& concept_id) const;
  std::optional<NodeIndex> find(std::string_view local_id) const;
  const std::string& id_of(NodeIndex node) const { return ids_.at(node); }
  ConceptId concept_of(NodeIndex node) const { return {graph_, ids_.at(node)}; }

  /// Direct hypernyms, sorted by node index, duplicates removed.
  const std::vector<NodeIndex>& parents(NodeIndex node) const { return parents_.at(node); }

  /// Exact match on normalized label text; empty when unknown.
  ConceptSet lookup_label(std::string_view normalized_label) const;
  bool has_label(std::string_view normalized_label) const;

  /// All (child, parent) edges as concept ids, ordered; for comparisons and export.
  std::set<std::pair<std::string, std::string>> edge_set() const;
  std::set<std::string> node_set() const;
  std::set<std::pair<std::string, std::string>> label_set() const;

  /// Breadth-first distances from `start` along hypernym edges, for every node
  /// reachable in 1..max_hops steps. `start` appears only if reachable via a cycle.
  std::unordered_map<NodeIndex, int> hop_distances(NodeIndex start, int max_hops) const;

 private:
  Graph graph_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, NodeIndex> index_;
  std::vector<std::vector<NodeIndex>> parents_;
  std::unordered_map<std::string, std::vector<NodeIndex>> labels_;
};

/// Minimal hop count h in [1, max_hops] at which any target is reached from
/// `start`; hop 0 never matches. Throws NotFoundError if `start` is not in the
/// snapshot and ValidationError if max_hops < 1.
HopResult hypernym_within(const KgSnapshot& snapshot, const ConceptId& start, const ConceptSet& targets,
                          int max_hops);

ConceptSet lookup_label(const KgSnapshot& snapshot, std::string_view normalized_label);

struct ImportOptions {
  /// Edges whose optional 4th-column confidence is below this are dropped. 0 disables.
  double confidence_threshold = 0.0;
  /// Index each node's identifier (underscores read as spaces) as a label.
  /// Unset: enabled for WebIsALOD only, whose concepts are named by their label.
  std::optional<bool> id_labels;
};

/// Builds a snapshot from triple TSV text and optional label TSV text.
KgSnapshot parse_triples(std::string_view triples_tsv, std::string_view labels_tsv, Graph graph,
                         const ImportOptions& options = {}, const std::string& source = "<triples>");

/// File variant. `labels_path` may be empty.
KgSnapshot import_triples(const std::filesystem::path& triples_path, const std::filesystem::path& labels_path,
                          Graph graph, const ImportOptions& options = {});

}  // namespace finmatcher
