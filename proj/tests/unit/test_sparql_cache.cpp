#include <doctest.h>

#include <fstream>

#include "finmatcher/errors.hpp"
#include "finmatcher/io.hpp"
#include "finmatcher/kgstore.hpp"
#include "finmatcher/sparql_cache.hpp"
#include "toy_corpus.hpp"

using namespace finmatcher;

namespace {

const char* kResponse = R"({
  "head": {"vars": ["p", "o"]},
  "results": {"bindings": [
    {"p": {"type": "uri", "value": "http://www.wikidata.org/prop/direct/P279"},
     "o": {"type": "uri", "value": "http://www.wikidata.org/entity/Q180490"}},
    {"p": {"type": "uri", "value": "http://www.wikidata.org/prop/direct/P31"},
     "o": {"type": "uri", "value": "http://www.wikidata.org/entity/Q1"}}
  ]}
})";

const char* kTemplate = "SELECT ?p ?o WHERE { wd:{id} ?p ?o . FILTER(?p IN (wdt:P31, wdt:P279)) }";

struct CountingTransport {
  int* calls;
  std::string* last_query;
  std::string operator()(const std::string&, const std::string& query) const {
    ++*calls;
    *last_query = query;
    return kResponse;
  }
};

}  // namespace

TEST_CASE("hex digest and query rendering") {
  CHECK(hex_digest("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(render_query("wd:{id} # {key}", "hypernyms:Q25323628") == "wd:Q25323628 # hypernyms:Q25323628");
  CHECK(render_query("{id}", "plain") == "plain");
}

TEST_CASE("parse SPARQL JSON results") {
  const auto triples = parse_sparql_results(kResponse, "Q25323628");
  REQUIRE(triples.size() == 2);
  CHECK(triples[0] == Triple{"Q25323628", "P279", "Q180490"});
  CHECK_THROWS_AS(parse_sparql_results("{}", "x"), FetchError);
  CHECK_THROWS_AS(parse_sparql_results(kResponse), FetchError);  // no subject available
  CHECK_THROWS_AS(parse_sparql_results("not json", "x"), FetchError);
}

TEST_CASE("cache miss fetches once, hit is byte-identical without network") {
  testing::TempDir dir;
  const SparqlCache cache(dir / "cache");
  int calls = 0;
  std::string query;
  FetchOptions options;
  options.allow_network = true;
  options.transport = CountingTransport{&calls, &query};

  const auto first = sparql_fetch_and_cache("https://example.org/sparql", kTemplate, "hypernyms:Q25323628", cache, options);
  CHECK(calls == 1);
  CHECK(query.find("wd:Q25323628") != std::string::npos);
  const auto bytes = io::read_file(cache.path_for("hypernyms:Q25323628"));

  FetchOptions offline;
  offline.transport = CountingTransport{&calls, &query};
  const auto second = sparql_fetch_and_cache("https://example.org/sparql", kTemplate, "hypernyms:Q25323628", cache, offline);
  CHECK(calls == 1);
  CHECK(second == first);
  CHECK(io::read_file(cache.path_for("hypernyms:Q25323628")) == bytes);

  // exactly one file per key, named by digest
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(cache.directory())) {
    ++files;
    CHECK(entry.path().stem() == hex_digest("hypernyms:Q25323628"));
  }
  CHECK(files == 1);

  // cached triples import as a snapshot
  const auto snap = parse_triples(triples_to_tsv(second), "", Graph::Wikidata);
  CHECK(hypernym_within(snap, {Graph::Wikidata, "Q25323628"}, {{Graph::Wikidata, "Q180490"}}, 1).found);
}

TEST_CASE("cold cache with network disabled is a fetch error naming endpoint and key") {
  testing::TempDir dir;
  const SparqlCache cache(dir.path());
  try {
    sparql_fetch_and_cache("https://example.org/sparql", kTemplate, "hypernyms:Q1", cache, {});
    FAIL("expected FetchError");
  } catch (const FetchError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("https://example.org/sparql") != std::string::npos);
    CHECK(msg.find("hypernyms:Q1") != std::string::npos);
  }
}

TEST_CASE("transport failures surface as fetch errors and leave no entry") {
  testing::TempDir dir;
  const SparqlCache cache(dir.path());
  FetchOptions options;
  options.allow_network = true;
  options.transport = [](const std::string&, const std::string&) -> std::string {
    throw std::runtime_error("connection refused");
  };
  CHECK_THROWS_AS(sparql_fetch_and_cache("https://e/s", kTemplate, "k:Q1", cache, options), FetchError);
  CHECK_FALSE(std::filesystem::exists(cache.path_for("k:Q1")));
}

TEST_CASE("corrupt entries raise CacheError; refresh recovers") {
  testing::TempDir dir;
  const SparqlCache cache(dir.path());
  cache.store("k:Q1", {{"Q1", "P31", "Q2"}});
  CHECK(cache.load("k:Q1") == std::vector<Triple>{{"Q1", "P31", "Q2"}});

  {
    std::ofstream(cache.path_for("k:Q1"), std::ios::trunc) << "garbage\n";
  }
  CHECK_THROWS_AS(cache.load("k:Q1"), CacheError);
  CHECK_THROWS_AS(sparql_fetch_and_cache("https://e/s", kTemplate, "k:Q1", cache, {}), CacheError);

  // truncated write (no terminator)
  const auto good = "#finmatcher-sparql-cache\tv1\tk:Q1\nQ1\tP31\tQ2\n";
  {
    std::ofstream(cache.path_for("k:Q1"), std::ios::trunc) << good;
  }
  CHECK_THROWS_AS(cache.load("k:Q1"), CacheError);

  int calls = 0;
  std::string query;
  FetchOptions options;
  options.allow_network = true;
  options.refresh = true;
  options.transport = CountingTransport{&calls, &query};
  const auto triples = sparql_fetch_and_cache("https://e/s", kTemplate, "k:Q1", cache, options);
  CHECK(calls == 1);
  CHECK(triples.size() == 2);
  CHECK(cache.load("k:Q1") == triples);
}
