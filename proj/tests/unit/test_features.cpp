#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <random>

#include "finmatcher/errors.hpp"
#include "finmatcher/features.hpp"
#include "oracles.hpp"
#include "toy_corpus.hpp"

using namespace finmatcher;

namespace {

std::size_t nonzeros(const ClassVector& v) {
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](double x) { return x != 0.0; }));
}

FeatureResources toy_resources(const testing::ToyCorpus& corpus) {
  FeatureResources r;
  r.wikidata = import_triples(corpus.wikidata_triples, corpus.wikidata_labels, Graph::Wikidata);
  r.wordnet = import_triples(corpus.wordnet_triples, corpus.wordnet_labels, Graph::WordNet);
  r.webisalod = import_triples(corpus.webisalod_triples, {}, Graph::WebIsALod);
  r.embeddings = load_embeddings(corpus.embeddings);
  return r;
}

}  // namespace

TEST_CASE("overlap feature") {
  const auto v = overlap_feature("Supranational Bond");
  CHECK(v[index_of(ClassLabel::Bonds)] == 1.0);
  CHECK(nonzeros(v) == 1);
  CHECK(overlap_feature("green bonds")[index_of(ClassLabel::Bonds)] == 1.0);
  CHECK(nonzeros(overlap_feature("XYZ")) == 0);
  CHECK(overlap_feature("MSCI World Equity Index")[index_of(ClassLabel::EquityIndex)] == 1.0);
  CHECK(overlap_feature("Money market MMIs")[index_of(ClassLabel::MMIs)] == 1.0);
}

TEST_CASE("overlap feature agrees with a naive substring check") {
  std::mt19937 gen(23);
  const std::vector<std::string> pieces = {"bond",  "Bonds", "swap",  "Option", "fund",   "future", "MMI",
                                           "stock", "index", "Equity", "credit", "forward", " ",     "x",
                                           "s",     "  ",    "Credit Index", "equity  index"};
  for (int trial = 0; trial < 1000; ++trial) {
    std::string term;
    const int n = static_cast<int>(gen() % 5);
    for (int i = 0; i < n; ++i) term += pieces[gen() % pieces.size()];
    const auto got = overlap_feature(term);
    const auto text = normalize_label(term);
    for (auto label : kAllClasses) {
      const bool expected = oracle::contains(text, normalize_label(canonical_name(label)));
      REQUIRE_MESSAGE(got[index_of(label)] == (expected ? 1.0 : 0.0), "term \"" << term << "\"");
    }
  }
}

TEST_CASE("lookup feature: inverse hop distance") {
  const auto wikidata = parse_triples("Q25323628\tP279\tQ180490\n"
                                      "green_bond\tP31\tdebt_paper\ndebt_paper\tP279\tbond\n",
                                      "Q25323628\tUCITS\nQ180490\tinvestment fund\nQ180490\tfund\n"
                                      "green_bond\tgreen paper\nbond\tbond\ndebt_paper\tdebt paper\n",
                                      Graph::Wikidata);
  ClassLinkTable table;
  for (auto label : kAllClasses) table.set(label, Graph::Wikidata, link(canonical_name(label), wikidata));

  const auto ucits = lookup_feature("UCITS", wikidata, table, 2);
  CHECK(ucits[index_of(ClassLabel::Funds)] == 1.0);
  CHECK(nonzeros(ucits) == 1);

  const auto two_hop = lookup_feature("green paper", wikidata, table, 2);
  CHECK(two_hop[index_of(ClassLabel::Bonds)] == 0.5);
  CHECK(lookup_feature("green paper", wikidata, table, 1)[index_of(ClassLabel::Bonds)] == 0.0);

  CHECK(nonzeros(lookup_feature("unknown thing", wikidata, table, 2)) == 0);
  CHECK(lookup_max_hops(Graph::WebIsALod) == 1);
  CHECK(lookup_max_hops(Graph::Wikidata) == 2);
}

TEST_CASE("lookup feature agrees with hypernym_within") {
  const auto corpus_dir = testing::TempDir();
  const auto corpus = testing::write_toy_corpus(corpus_dir.path());
  const auto resources = toy_resources(corpus);
  const auto table = ClassLinkTable::build(resources);
  const auto& snap = *resources.wikidata;
  for (const auto& record : corpus.records) {
    const auto links = link(record.term, snap);
    const auto got = lookup_feature(links, snap, table, 2);
    for (auto label : kAllClasses) {
      double expected = 0.0;
      for (const auto& c : links.concepts()) {
        const auto hit = hypernym_within(snap, c, table.links(label, Graph::Wikidata).concepts(), 2);
        if (hit.found) expected = std::max(expected, 1.0 / *hit.hops);
      }
      CHECK(got[index_of(label)] == expected);
    }
  }
}

TEST_CASE("rdf2vec feature") {
  KgSnapshot::Builder builder(Graph::WebIsALod);
  for (const char* id : {"bond", "cdx", "emerging_markets", "credit", "index"}) {
    std::string label = id;
    std::replace(label.begin(), label.end(), '_', ' ');
    builder.add_label(id, label);
  }
  const auto snap = std::move(builder).build();
  EmbeddingStore store;
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::map<std::string, std::vector<double>> vectors;
  for (const char* id : {"bond", "cdx", "emerging_markets", "credit", "index"}) {
    std::vector<double> v(kEmbeddingDim);
    for (auto& x : v) x = value(gen);
    vectors[id] = v;
    store.insert({Graph::WebIsALod, id}, v);
  }
  ClassLinkTable table;
  for (auto label : kAllClasses) table.set(label, Graph::WebIsALod, link(canonical_name(label), snap));

  CHECK(rdf2vec_feature("bond", snap, store, table)[index_of(ClassLabel::Bonds)] == doctest::Approx(1.0));
  CHECK(nonzeros(rdf2vec_feature("zzz", snap, store, table)) == 0);

  const auto decomposed = rdf2vec_feature("CDX Emerging Markets", snap, store, table);
  const double expected =
      oracle::average_of_max({vectors["cdx"], vectors["emerging_markets"]}, {vectors["credit"], vectors["index"]});
  CHECK(std::abs(decomposed[index_of(ClassLabel::CreditIndex)] - expected) < 1e-12);
}

TEST_CASE("signal layout") {
  CHECK(signal_index(FeatureGroup::Overlap, ClassLabel::Bonds) == 2);
  CHECK(signal_index(FeatureGroup::WebIsALodRdf2vec, ClassLabel::Forward) == 49);

  const FeatureResources none;
  const FeatureExtractor extractor(none);
  const auto zero = extractor.build_signal("XYZ");
  CHECK(std::all_of(zero.begin(), zero.end(), [](double x) { return x == 0.0; }));

  ExtractionDiagnostics diagnostics;
  const auto s = extractor.build_signal("Supranational Bond", &diagnostics);
  CHECK(s[2] == 1.0);
  CHECK(std::count_if(s.begin(), s.end(), [](double x) { return x != 0.0; }) == 1);
  CHECK(diagnostics.terms == 1);
  CHECK(diagnostics.missing_resource[index_of(FeatureGroup::Wikidata)] == 1);
  CHECK(diagnostics.missing_resource[index_of(FeatureGroup::WebIsALodRdf2vec)] == 1);
  CHECK(diagnostics.missing_resource[index_of(FeatureGroup::Overlap)] == 0);
}

TEST_CASE("extraction over the toy corpus: slices, ranges, determinism") {
  testing::TempDir dir;
  const auto corpus = testing::write_toy_corpus(dir.path());
  const auto resources = toy_resources(corpus);
  const FeatureExtractor extractor(resources);
  std::vector<std::string> terms;
  for (const auto& r : corpus.records) terms.push_back(r.term);

  ExtractionDiagnostics diagnostics;
  const auto signals = extractor.extract(terms, &diagnostics);
  const auto again = extractor.extract(terms, nullptr, 4);
  REQUIRE(signals.size() == terms.size());
  CHECK(std::memcmp(signals.data(), again.data(), signals.size() * sizeof(SignalVector)) == 0);
  CHECK(diagnostics.terms == terms.size());
  CHECK(diagnostics.linked_terms[static_cast<std::size_t>(Graph::Wikidata)] == terms.size());
  CHECK(diagnostics.embedded_terms == terms.size());

  std::size_t half = 0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& s = signals[i];
    CHECK(group_slice(s, FeatureGroup::Overlap) == overlap_feature(terms[i]));
    CHECK(group_slice(s, FeatureGroup::Wikidata) ==
          lookup_feature(terms[i], *resources.wikidata, extractor.class_links(), 2));
    CHECK(group_slice(s, FeatureGroup::WordNet) ==
          lookup_feature(terms[i], *resources.wordnet, extractor.class_links(), 2));
    CHECK(group_slice(s, FeatureGroup::WebIsALodHypernyms) ==
          lookup_feature(terms[i], *resources.webisalod, extractor.class_links(), 1));
    CHECK(group_slice(s, FeatureGroup::WebIsALodRdf2vec) ==
          rdf2vec_feature(terms[i], *resources.webisalod, *resources.embeddings, extractor.class_links()));
    for (auto v : s) CHECK((v >= -1.0 && v <= 1.0));
    for (auto group : {FeatureGroup::Wikidata, FeatureGroup::WordNet, FeatureGroup::WebIsALodHypernyms}) {
      for (auto v : group_slice(s, group)) CHECK((v == 0.0 || v == 0.5 || v == 1.0));
    }
    const auto gold = *corpus.records[i].gold;
    CHECK(s[signal_index(FeatureGroup::WebIsALodHypernyms, gold)] == 1.0);
    half += s[signal_index(FeatureGroup::Wikidata, gold)] == 0.5 ? 1 : 0;
  }
  CHECK(half == terms.size() / 2);
}

TEST_CASE("signal CSV") {
  std::vector<std::string> terms = {"a, b", "plain"};
  std::vector<SignalVector> signals(2);
  signals[0][0] = 1.0;
  signals[1][49] = 0.1 + 0.2;
  const auto text = signals_to_csv(terms, signals);
  CHECK(text.rfind("term,g0_0,g0_1,", 0) == 0);
  CHECK(text.find("g4_9\n") != std::string::npos);
  const auto back = signals_from_csv(text);
  CHECK(back.terms == terms);
  CHECK(back.signals == signals);
  CHECK(signals_to_csv({}, {}).find('\n') == text.find('\n'));
  CHECK_THROWS_AS(signals_from_csv("term,g0_0\nx,1\n"), ParseError);
}
