#include <doctest.h>

#include <fstream>
#include <random>

#include "finmatcher/dataset.hpp"
#include "finmatcher/errors.hpp"
#include "toy_corpus.hpp"

using namespace finmatcher;

TEST_CASE("class labels keep the fixed index order") {
  CHECK(kAllClasses.size() == 10);
  CHECK(canonical_name(ClassLabel::EquityIndex) == "Equity Index");
  CHECK(canonical_name(ClassLabel::Forward) == "Forward");
  CHECK(index_of(ClassLabel::Bonds) == 2);
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    CHECK(index_of(class_from_index(i)) == i);
    CHECK(parse_class_label(canonical_name(class_from_index(i))) == class_from_index(i));
  }
  CHECK_THROWS_AS(class_from_index(10), ValidationError);
}

TEST_CASE("label parsing is case-insensitive and closed") {
  CHECK(parse_class_label("bonds") == ClassLabel::Bonds);
  CHECK(parse_class_label("EQUITY INDEX") == ClassLabel::EquityIndex);
  CHECK(parse_class_label("mmis") == ClassLabel::MMIs);
  CHECK_FALSE(parse_class_label("Bondz").has_value());
  CHECK_FALSE(parse_class_label("Bond").has_value());
}

TEST_CASE("normalize_label") {
  CHECK(normalize_label("Bonds") == "bond");
  CHECK(normalize_label("swap") == "swap");
  CHECK(normalize_label("  Equity   Index ") == "equity index");
  CHECK(normalize_label("MMIs") == "mmi");
  CHECK(normalize_label("s") == "s");
  CHECK(normalize_label("as") == "as");
  CHECK(normalize_label("class") == "class");
  CHECK(normalize_label("") == "");
  CHECK(normalize_label("\tGreen\nBonds ") == "green bond");
}

TEST_CASE("normalize_label is idempotent on random strings") {
  std::mt19937 gen(7);
  const std::string alphabet = "abSs  \tXyz";
  for (int trial = 0; trial < 5000; ++trial) {
    std::string s;
    const int len = static_cast<int>(gen() % 12);
    for (int i = 0; i < len; ++i) s.push_back(alphabet[gen() % alphabet.size()]);
    const auto once = normalize_label(s);
    REQUIRE_MESSAGE(normalize_label(once) == once, "input: \"" << s << "\"");
  }
}

TEST_CASE("load JSON dataset") {
  const auto ds = parse_dataset(R"([{"term":"green bonds","label":"Bonds"}])", DatasetFormat::Json);
  REQUIRE(ds.size() == 1);
  CHECK(ds.records()[0].term == "green bonds");
  CHECK(ds.count(ClassLabel::Bonds) == 1);
  CHECK(ds.labeled_count() == 1);

  const auto empty = parse_dataset("[]", DatasetFormat::Json);
  CHECK(empty.size() == 0);
  for (auto c : empty.label_counts()) CHECK(c == 0);

  CHECK_THROWS_AS(parse_dataset(R"([{"term":"x","label":"Bondz"}])", DatasetFormat::Json), ValidationError);
  try {
    parse_dataset(R"([{"term":"x","label":"Bondz"}])", DatasetFormat::Json);
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("Bondz") != std::string::npos);
  }
}

TEST_CASE("JSON parse errors carry a line") {
  try {
    parse_dataset("[\n{\"term\": \"a\",\n oops}\n]", DatasetFormat::Json, "bad.json");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).rfind("bad.json:3", 0) == 0);
  }
}

TEST_CASE("prediction-only records and empty terms") {
  const auto ds = parse_dataset(R"([{"term":"UCITS"},{"term":"b","label":null}])", DatasetFormat::Json);
  CHECK(ds.size() == 2);
  CHECK(ds.labeled_count() == 0);
  CHECK_THROWS_AS(ds.golds(), ValidationError);
  CHECK_THROWS_AS(parse_dataset(R"([{"term":"   ","label":"Bonds"}])", DatasetFormat::Json), ValidationError);
}

TEST_CASE("CSV dataset with quoting") {
  const auto ds = parse_dataset("term,label\n\"Bonds, green\",bonds\nXYZ swap,Swap\nunlabeled,\n", DatasetFormat::Csv);
  REQUIRE(ds.size() == 3);
  CHECK(ds.records()[0].term == "Bonds, green");
  CHECK(ds.records()[1].gold == ClassLabel::Swap);
  CHECK_FALSE(ds.records()[2].gold.has_value());
  CHECK_THROWS_AS(parse_dataset("name,label\na,Bonds\n", DatasetFormat::Csv), ParseError);
  CHECK_THROWS_AS(parse_dataset("term,label\na,Bonds,extra\n", DatasetFormat::Csv), ParseError);
  CHECK_THROWS_AS(parse_dataset("term,label\na,Bondz\n", DatasetFormat::Csv), ValidationError);
}

TEST_CASE("serialize and reload round-trips; counts match labeled records") {
  std::mt19937 gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<TermRecord> records;
    const int n = static_cast<int>(gen() % 20);
    for (int i = 0; i < n; ++i) {
      std::string term = "t" + std::to_string(gen() % 1000);
      if (gen() % 3 == 0) term += ", \"quoted\"";
      std::optional<ClassLabel> gold;
      if (gen() % 4) gold = class_from_index(gen() % kNumClasses);
      records.push_back({term, gold});
    }
    const Dataset ds(records);
    std::size_t labeled = 0;
    for (const auto& r : ds.records()) labeled += r.gold ? 1 : 0;
    CHECK(ds.labeled_count() == labeled);
    for (auto format : {DatasetFormat::Json, DatasetFormat::Csv}) {
      const auto back = parse_dataset(serialize_dataset(ds, format), format);
      CHECK(back.records() == ds.records());
    }
  }
}

TEST_CASE("load_dataset from disk") {
  testing::TempDir dir;
  const auto path = dir / "d.csv";
  {
    std::ofstream(path) << "term,label\ngreen bonds,Bonds\n";
  }
  CHECK(format_for_path(path) == DatasetFormat::Csv);
  CHECK(load_dataset(path, DatasetFormat::Csv).size() == 1);
  CHECK_THROWS_AS(load_dataset(dir / "missing.json", DatasetFormat::Json), IoError);
}
