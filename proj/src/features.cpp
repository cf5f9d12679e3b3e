#include "finmatcher/features.hpp"

#include <algorithm>
#include <sstream>
#include <thread>

#include "finmatcher/csv.hpp"
#include "finmatcher/errors.hpp"

namespace finmatcher {
namespace {

constexpr std::array<Graph, 3> kGraphs = {Graph::WordNet, Graph::Wikidata, Graph::WebIsALod};

std::size_t graph_slot(Graph graph) { return static_cast<std::size_t>(graph); }

}  // namespace

std::string_view group_display_name(FeatureGroup group) {
  switch (group) {
    case FeatureGroup::Overlap:
      return "Word Overlap";
    case FeatureGroup::Wikidata:
      return "Wikidata Hypernyms";
    case FeatureGroup::WordNet:
      return "WordNet Hypernyms";
    case FeatureGroup::WebIsALodHypernyms:
      return "ALOD Hypernyms";
    case FeatureGroup::WebIsALodRdf2vec:
      return "ALOD RDF2vec";
  }
  return "?";
}

ClassVector group_slice(const SignalVector& signal, FeatureGroup group) {
  ClassVector out{};
  std::copy_n(signal.begin() + static_cast<std::ptrdiff_t>(index_of(group) * kNumClasses), kNumClasses, out.begin());
  return out;
}

void set_group_slice(SignalVector& signal, FeatureGroup group, const ClassVector& values) {
  std::copy(values.begin(), values.end(), signal.begin() + static_cast<std::ptrdiff_t>(index_of(group) * kNumClasses));
}

int lookup_max_hops(Graph graph) { return graph == Graph::WebIsALod ? 1 : 2; }

const KgSnapshot* FeatureResources::snapshot(Graph graph) const {
  switch (graph) {
    case Graph::WordNet:
      return wordnet ? &*wordnet : nullptr;
    case Graph::Wikidata:
      return wikidata ? &*wikidata : nullptr;
    case Graph::WebIsALod:
      return webisalod ? &*webisalod : nullptr;
  }
  return nullptr;
}

ClassLinkTable ClassLinkTable::build(const FeatureResources& resources) {
  ClassLinkTable table;
  for (auto graph : kGraphs) {
    const auto* snapshot = resources.snapshot(graph);
    if (!snapshot) continue;
    for (auto label : kAllClasses) {
      table.set(label, graph, link(canonical_name(label), *snapshot, resources.stopwords));
    }
  }
  return table;
}

const LinkSet& ClassLinkTable::links(ClassLabel label, Graph graph) const {
  return table_[index_of(label)][graph_slot(graph)];
}

void ClassLinkTable::set(ClassLabel label, Graph graph, LinkSet links) {
  table_[index_of(label)][graph_slot(graph)] = std::move(links);
}

ClassVector overlap_feature(std::string_view term) {
  const auto text = normalize_label(term);
  ClassVector out{};
  for (auto label : kAllClasses) {
    out[index_of(label)] = text.find(normalize_label(canonical_name(label))) != std::string::npos ? 1.0 : 0.0;
  }
  return out;
}

ClassVector lookup_feature(const LinkSet& term_links, const KgSnapshot& snapshot, const ClassLinkTable& class_links,
                           int max_hops) {
  ClassVector out{};
  const auto graph = snapshot.graph();
  // Minimal hop count per reached node over all term concepts.
  std::unordered_map<KgSnapshot::NodeIndex, int> reached;
  for (const auto& concept_id : term_links.concepts()) {
    const auto node = snapshot.find(concept_id.local_id);
    if (!node) continue;
    for (const auto& [target, hops] : snapshot.hop_distances(*node, max_hops)) {
      auto [it, inserted] = reached.try_emplace(target, hops);
      if (!inserted) it->second = std::min(it->second, hops);
    }
  }
  if (reached.empty()) return out;
  for (auto label : kAllClasses) {
    std::optional<int> best;
    for (const auto& concept_id : class_links.links(label, graph).concepts()) {
      const auto node = snapshot.find(concept_id.local_id);
      if (!node) continue;
      auto it = reached.find(*node);
      if (it != reached.end() && (!best || it->second < *best)) best = it->second;
    }
    if (best) out[index_of(label)] = 1.0 / static_cast<double>(*best);
  }
  return out;
}

ClassVector lookup_feature(std::string_view term, const KgSnapshot& snapshot, const ClassLinkTable& class_links,
                           int max_hops, const StopwordSet& stopwords) {
  return lookup_feature(link(term, snapshot, stopwords), snapshot, class_links, max_hops);
}

ClassVector rdf2vec_feature(const LinkSet& term_links, const EmbeddingStore& store, const ClassLinkTable& class_links) {
  ClassVector out{};
  const auto hyponyms = term_links.concepts();
  if (hyponyms.empty()) return out;
  for (auto label : kAllClasses) {
    out[index_of(label)] = linkset_similarity(hyponyms, class_links.links(label, Graph::WebIsALod).concepts(), store);
  }
  return out;
}

ClassVector rdf2vec_feature(std::string_view term, const KgSnapshot& snapshot, const EmbeddingStore& store,
                            const ClassLinkTable& class_links, const StopwordSet& stopwords) {
  return rdf2vec_feature(link(term, snapshot, stopwords), store, class_links);
}

void ExtractionDiagnostics::merge(const ExtractionDiagnostics& other) {
  terms += other.terms;
  embedded_terms += other.embedded_terms;
  for (std::size_t i = 0; i < linked_terms.size(); ++i) linked_terms[i] += other.linked_terms[i];
  for (std::size_t i = 0; i < missing_resource.size(); ++i) missing_resource[i] += other.missing_resource[i];
}

std::string ExtractionDiagnostics::summary() const {
  std::ostringstream out;
  auto rate = [&](std::size_t n) {
    std::ostringstream r;
    r.setf(std::ios::fixed);
    r.precision(3);
    r << (terms ? static_cast<double>(n) / static_cast<double>(terms) : 0.0);
    return r.str();
  };
  out << "terms: " << terms << '\n';
  for (auto graph : kGraphs) {
    out << "link hit rate " << graph_name(graph) << ": " << rate(linked_terms[graph_slot(graph)]) << " ("
        << linked_terms[graph_slot(graph)] << ")\n";
  }
  out << "embedding coverage: " << rate(embedded_terms) << " (" << embedded_terms << ")\n";
  for (auto group : kAllGroups) {
    if (missing_resource[index_of(group)]) {
      out << "missing resources for " << group_display_name(group) << ": " << missing_resource[index_of(group)]
          << " terms zeroed\n";
    }
  }
  return out.str();
}

FeatureExtractor::FeatureExtractor(const FeatureResources& resources)
    : resources_(&resources), class_links_(ClassLinkTable::build(resources)) {}

SignalVector FeatureExtractor::build_signal(std::string_view term, ExtractionDiagnostics* diagnostics) const {
  ExtractionDiagnostics local;
  local.terms = 1;
  SignalVector signal{};
  set_group_slice(signal, FeatureGroup::Overlap, overlap_feature(term));

  std::array<LinkSet, 3> term_links;
  for (auto graph : kGraphs) {
    if (const auto* snapshot = resources_->snapshot(graph)) {
      term_links[graph_slot(graph)] = link(term, *snapshot, resources_->stopwords);
      if (!term_links[graph_slot(graph)].empty()) ++local.linked_terms[graph_slot(graph)];
    }
  }

  const std::array<std::pair<FeatureGroup, Graph>, 3> lookups = {{
      {FeatureGroup::Wikidata, Graph::Wikidata},
      {FeatureGroup::WordNet, Graph::WordNet},
      {FeatureGroup::WebIsALodHypernyms, Graph::WebIsALod},
  }};
  for (const auto& [group, graph] : lookups) {
    const auto* snapshot = resources_->snapshot(graph);
    if (!snapshot) {
      ++local.missing_resource[index_of(group)];
      continue;
    }
    set_group_slice(signal, group,
                    lookup_feature(term_links[graph_slot(graph)], *snapshot, class_links_, lookup_max_hops(graph)));
  }

  if (resources_->webisalod && resources_->embeddings) {
    const auto& links = term_links[graph_slot(Graph::WebIsALod)];
    const auto concepts = links.concepts();
    if (std::any_of(concepts.begin(), concepts.end(),
                    [&](const ConceptId& id) { return resources_->embeddings->find(id) != nullptr; })) {
      ++local.embedded_terms;
    }
    set_group_slice(signal, FeatureGroup::WebIsALodRdf2vec, rdf2vec_feature(links, *resources_->embeddings, class_links_));
  } else {
    ++local.missing_resource[index_of(FeatureGroup::WebIsALodRdf2vec)];
  }

  if (diagnostics) diagnostics->merge(local);
  return signal;
}

std::vector<SignalVector> FeatureExtractor::extract(std::span<const std::string> terms,
                                                    ExtractionDiagnostics* diagnostics, unsigned threads) const {
  std::vector<SignalVector> out(terms.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, terms.size())));
  std::vector<ExtractionDiagnostics> partial(threads);
  auto work = [&](unsigned worker) {
    for (std::size_t i = worker; i < terms.size(); i += threads) out[i] = build_signal(terms[i], &partial[worker]);
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }
  if (diagnostics) {
    for (const auto& p : partial) diagnostics->merge(p);
  }
  return out;
}

std::vector<std::string> terms_of(const Dataset& dataset) {
  std::vector<std::string> out;
  out.reserve(dataset.size());
  for (const auto& record : dataset.records()) out.push_back(record.term);
  return out;
}

std::string signals_to_csv(std::span<const std::string> terms, std::span<const SignalVector> signals) {
  if (terms.size() != signals.size()) throw ValidationError("terms and signals differ in length");
  std::ostringstream out;
  csv::Row header{"term"};
  for (std::size_t g = 0; g < kNumGroups; ++g) {
    for (std::size_t c = 0; c < kNumClasses; ++c) header.push_back("g" + std::to_string(g) + "_" + std::to_string(c));
  }
  csv::write_row(out, header);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    csv::Row row{terms[i]};
    for (double v : signals[i]) row.push_back(csv::format_double(v));
    csv::write_row(out, row);
  }
  return out.str();
}

SignalTable signals_from_csv(std::string_view text, const std::string& source) {
  const auto rows = csv::parse(text, source);
  if (rows.empty() || rows.front().size() != kSignalSize + 1 || rows.front()[0] != "term") {
    throw ParseError(source, 1, "expected header term,g0_0..g4_9");
  }
  SignalTable table;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != kSignalSize + 1) {
      throw ParseError(source, r + 1, "expected " + std::to_string(kSignalSize + 1) + " columns");
    }
    SignalVector signal{};
    for (std::size_t i = 0; i < kSignalSize; ++i) {
      try {
        std::size_t used = 0;
        signal[i] = std::stod(row[i + 1], &used);
        if (used != row[i + 1].size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw ParseError(source, r + 1, "invalid number \"" + row[i + 1] + "\"");
      }
    }
    table.terms.push_back(row[0]);
    table.signals.push_back(signal);
  }
  return table;
}

}  // namespace finmatcher
