#include "finmatcher/kgstore.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <deque>

#include "finmatcher/dataset.hpp"
#include "finmatcher/errors.hpp"
#include "finmatcher/io.hpp"

namespace finmatcher {
namespace {

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    fn(line_no, line);
    start = end + 1;
  }
}

std::string_view local_name(std::string_view predicate) {
  const auto cut = predicate.find_last_of("/#:");
  return cut == std::string_view::npos ? predicate : predicate.substr(cut + 1);
}

std::string label_from_id(std::string_view id) {
  std::string out(id);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

}  // namespace

std::string_view graph_name(Graph graph) {
  switch (graph) {
    case Graph::WordNet:
      return "wordnet";
    case Graph::Wikidata:
      return "wikidata";
    case Graph::WebIsALod:
      return "webisalod";
  }
  return "?";
}

Graph parse_graph(std::string_view name) {
  std::string lowered(trim_view(name));
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); });
  for (auto graph : {Graph::WordNet, Graph::Wikidata, Graph::WebIsALod}) {
    if (lowered == graph_name(graph)) return graph;
  }
  throw ValidationError("unknown graph tag \"" + std::string(name) + "\" (expected wordnet, wikidata or webisalod)");
}

std::string normalize_concept_id(Graph graph, std::string_view raw) {
  const auto trimmed = trim_view(raw);
  if (graph != Graph::WebIsALod) return std::string(trimmed);
  std::string out;
  out.reserve(trimmed.size());
  for (char c : trimmed) {
    out.push_back(c == ' ' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

bool is_hypernym_predicate(Graph graph, std::string_view predicate) {
  const auto name = local_name(trim_view(predicate));
  switch (graph) {
    case Graph::Wikidata:
      return name == "P31" || name == "P279";
    case Graph::WebIsALod:
      return name == "broader";
    case Graph::WordNet:
      return name == "hypernym";
  }
  return false;
}

// ---------------------------------------------------------------------------

KgSnapshot::Builder::Builder(Graph graph) : graph_(graph) {}

KgSnapshot::NodeIndex KgSnapshot::Builder::add_node(std::string_view local_id) {
  if (local_id.empty()) throw ValidationError("empty concept identifier");
  auto [it, inserted] = index_.try_emplace(std::string(local_id), static_cast<NodeIndex>(ids_.size()));
  if (inserted) {
    ids_.emplace_back(local_id);
    parents_.emplace_back();
  }
  return it->second;
}

void KgSnapshot::Builder::add_edge(std::string_view child, std::string_view parent) {
  const auto c = add_node(child);
  const auto p = add_node(parent);
  parents_[c].push_back(p);
}

void KgSnapshot::Builder::add_label(std::string_view local_id, std::string_view label) {
  const auto node = add_node(local_id);
  auto key = normalize_label(label);
  if (key.empty()) return;
  labels_[std::move(key)].push_back(node);
}

KgSnapshot KgSnapshot::Builder::build() && {
  KgSnapshot snapshot(graph_);
  for (auto& list : parents_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  for (auto& [label, nodes] : labels_) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  }
  snapshot.ids_ = std::move(ids_);
  snapshot.index_ = std::move(index_);
  snapshot.parents_ = std::move(parents_);
  snapshot.labels_ = std::move(labels_);
  return snapshot;
}

// ---------------------------------------------------------------------------

std::size_t KgSnapshot::edge_count() const noexcept {
  std::size_t n = 0;
  for (const auto& list : parents_) n += list.size();
  return n;
}

bool KgSnapshot::contains(const ConceptId& concept_id) const {
  return concept_id.graph == graph_ && index_.count(concept_id.local_id) > 0;
}

std::optional<KgSnapshot::NodeIndex> KgSnapshot::find(std::string_view local_id) const {
  auto it = index_.find(std::string(local_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ConceptSet KgSnapshot::lookup_label(std::string_view normalized_label) const {
  ConceptSet out;
  auto it = labels_.find(std::string(normalized_label));
  if (it != labels_.end()) {
    for (auto node : it->second) out.insert(concept_of(node));
  }
  return out;
}

bool KgSnapshot::has_label(std::string_view normalized_label) const {
  return labels_.count(std::string(normalized_label)) > 0;
}

std::set<std::pair<std::string, std::string>> KgSnapshot::edge_set() const {
  std::set<std::pair<std::string, std::string>> out;
  for (NodeIndex c = 0; c < parents_.size(); ++c) {
    for (auto p : parents_[c]) out.emplace(ids_[c], ids_[p]);
  }
  return out;
}

std::set<std::string> KgSnapshot::node_set() const { return {ids_.begin(), ids_.end()}; }

std::set<std::pair<std::string, std::string>> KgSnapshot::label_set() const {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& [label, nodes] : labels_) {
    for (auto node : nodes) out.emplace(label, ids_[node]);
  }
  return out;
}

std::unordered_map<KgSnapshot::NodeIndex, int> KgSnapshot::hop_distances(NodeIndex start, int max_hops) const {
  std::unordered_map<NodeIndex, int> dist;
  std::vector<char> visited(ids_.size(), 0);
  std::vector<NodeIndex> frontier{start};
  visited.at(start) = 1;
  for (int hop = 1; hop <= max_hops && !frontier.empty(); ++hop) {
    std::vector<NodeIndex> next;
    for (auto node : frontier) {
      for (auto parent : parents_[node]) {
        if (parent == start && !dist.count(start)) {
          dist[start] = hop;  // cycle back to the start node
        }
        if (!visited[parent]) {
          visited[parent] = 1;
          dist[parent] = hop;
          next.push_back(parent);
        }
      }
    }
    frontier = std::move(next);
  }
  return dist;
}

// ---------------------------------------------------------------------------

HopResult hypernym_within(const KgSnapshot& snapshot, const ConceptId& start, const ConceptSet& targets,
                          int max_hops) {
  if (max_hops < 1) throw ValidationError("max_hops must be >= 1");
  const auto node = start.graph == snapshot.graph() ? snapshot.find(start.local_id) : std::nullopt;
  if (!node) {
    throw NotFoundError("concept \"" + start.local_id + "\" is not in the " +
                        std::string(graph_name(snapshot.graph())) + " snapshot");
  }
  std::optional<int> best;
  for (const auto& [reached, hops] : snapshot.hop_distances(*node, max_hops)) {
    if (targets.count(snapshot.concept_of(reached)) && (!best || hops < *best)) best = hops;
  }
  return best ? HopResult::hit(*best) : HopResult::miss();
}

ConceptSet lookup_label(const KgSnapshot& snapshot, std::string_view normalized_label) {
  return snapshot.lookup_label(normalized_label);
}

KgSnapshot parse_triples(std::string_view triples_tsv, std::string_view labels_tsv, Graph graph,
                         const ImportOptions& options, const std::string& source) {
  KgSnapshot::Builder builder(graph);
  for_each_line(triples_tsv, [&](std::size_t line_no, std::string_view line) {
    if (trim_view(line).empty() || trim_view(line).front() == '#') return;
    const auto cols = split_tabs(line);
    if (cols.size() != 3 && cols.size() != 4) {
      throw ParseError(source, line_no, "expected subject<TAB>predicate<TAB>object[<TAB>confidence], got " +
                                            std::to_string(cols.size()) + " columns");
    }
    const auto subject = normalize_concept_id(graph, cols[0]);
    const auto object = normalize_concept_id(graph, cols[2]);
    if (subject.empty() || object.empty()) throw ParseError(source, line_no, "empty subject or object");
    double confidence = 1.0;
    if (cols.size() == 4) {
      const auto text = trim_view(cols[3]);
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), confidence);
      if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(confidence)) {
        throw ParseError(source, line_no, "invalid confidence \"" + std::string(text) + "\"");
      }
    }
    builder.add_node(subject);
    if (!is_hypernym_predicate(graph, cols[1])) return;
    if (confidence >= options.confidence_threshold) {
      builder.add_edge(subject, object);
    } else {
      builder.add_node(object);
    }
  });
  const std::string label_source = source + " (labels)";
  for_each_line(labels_tsv, [&](std::size_t line_no, std::string_view line) {
    if (trim_view(line).empty() || trim_view(line).front() == '#') return;
    const auto cols = split_tabs(line);
    if (cols.size() != 2) {
      throw ParseError(label_source, line_no, "expected concept<TAB>label");
    }
    const auto id = normalize_concept_id(graph, cols[0]);
    if (id.empty()) throw ParseError(label_source, line_no, "empty concept");
    builder.add_label(id, cols[1]);
  });
  if (options.id_labels.value_or(graph == Graph::WebIsALod)) {
    for (KgSnapshot::NodeIndex node = 0; node < builder.node_count(); ++node) {
      builder.add_label(builder.id(node), label_from_id(builder.id(node)));
    }
  }
  return std::move(builder).build();
}

KgSnapshot import_triples(const std::filesystem::path& triples_path, const std::filesystem::path& labels_path,
                          Graph graph, const ImportOptions& options) {
  const auto triples = io::read_file(triples_path);
  const auto labels = labels_path.empty() ? std::string() : io::read_file(labels_path);
  return parse_triples(triples, labels, graph, options, triples_path.string());
}

}  // namespace finmatcher
