#include "finmatcher/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "finmatcher/csv.hpp"
#include "finmatcher/errors.hpp"
#include "finmatcher/io.hpp"

namespace finmatcher {
namespace {

constexpr std::array<std::string_view, kNumClasses> kNames = {
    "Equity Index", "Credit Index", "Bonds", "Swap", "Option", "Funds", "Future", "MMIs", "Stocks", "Forward",
};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

char to_lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::string trim(std::string_view text) {
  auto begin = std::find_if_not(text.begin(), text.end(), is_space);
  auto end = std::find_if_not(text.rbegin(), text.rend(), is_space).base();
  return begin < end ? std::string(begin, end) : std::string();
}

}  // namespace

ClassLabel class_from_index(std::size_t index) {
  if (index >= kNumClasses) {
    throw ValidationError("class index out of range: " + std::to_string(index));
  }
  return static_cast<ClassLabel>(index);
}

std::string_view canonical_name(ClassLabel label) { return kNames.at(index_of(label)); }

std::optional<ClassLabel> parse_class_label(std::string_view text) {
  const std::string wanted = trim(text);
  for (auto label : kAllClasses) {
    const auto name = canonical_name(label);
    if (name.size() == wanted.size() &&
        std::equal(name.begin(), name.end(), wanted.begin(), [](char a, char b) { return to_lower(a) == to_lower(b); })) {
      return label;
    }
  }
  return std::nullopt;
}

std::string normalize_label(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(to_lower(c));
  }
  const auto last_space = out.rfind(' ');
  const std::size_t last_token_len = last_space == std::string::npos ? out.size() : out.size() - last_space - 1;
  if (last_token_len >= 3 && out.back() == 's' && out[out.size() - 2] != 's') {
    out.pop_back();
  }
  return out;
}

Dataset::Dataset(std::vector<TermRecord> records) : records_(std::move(records)) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    auto& record = records_[i];
    record.term = trim(record.term);
    if (record.term.empty()) {
      throw ValidationError("record " + std::to_string(i + 1) + " has an empty term");
    }
    if (record.gold) {
      ++counts_[index_of(*record.gold)];
    }
  }
}

std::size_t Dataset::labeled_count() const noexcept {
  return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

std::vector<ClassLabel> Dataset::golds() const {
  std::vector<ClassLabel> out;
  out.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (!records_[i].gold) {
      throw ValidationError("record " + std::to_string(i + 1) + " (\"" + records_[i].term + "\") has no gold label");
    }
    out.push_back(*records_[i].gold);
  }
  return out;
}

DatasetFormat format_for_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), to_lower);
  return ext == ".csv" ? DatasetFormat::Csv : DatasetFormat::Json;
}

namespace {

std::optional<ClassLabel> require_label(std::string_view text, const std::string& where) {
  if (trim(text).empty()) {
    return std::nullopt;
  }
  auto label = parse_class_label(text);
  if (!label) {
    throw ValidationError(where + ": unknown class label \"" + std::string(text) + "\"");
  }
  return label;
}

Dataset parse_json(std::string_view text, const std::string& source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // byte offset -> line for the error message
    const auto offset = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
    throw ParseError(source, line, "invalid JSON at byte " + std::to_string(e.byte));
  }
  if (!doc.is_array()) {
    throw ParseError(source, 1, "expected a JSON array of records");
  }
  std::vector<TermRecord> records;
  records.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& item = doc[i];
    const std::string where = source + " record " + std::to_string(i + 1);
    if (!item.is_object() || !item.contains("term") || !item["term"].is_string()) {
      throw ValidationError(where + ": expected an object with a string \"term\"");
    }
    TermRecord record{item["term"].get<std::string>(), std::nullopt};
    if (item.contains("label") && !item["label"].is_null()) {
      if (!item["label"].is_string()) {
        throw ValidationError(where + ": \"label\" must be a string");
      }
      record.gold = require_label(item["label"].get<std::string>(), where);
    }
    records.push_back(std::move(record));
  }
  return Dataset(std::move(records));
}

Dataset parse_csv(std::string_view text, const std::string& source) {
  const auto rows = csv::parse(text, source);
  if (rows.empty()) {
    throw ParseError(source, 1, "missing header row `term,label`");
  }
  const auto& header = rows.front();
  if (header.size() != 2 || trim(header[0]) != "term" || trim(header[1]) != "label") {
    throw ParseError(source, 1, "header must be `term,label`");
  }
  std::vector<TermRecord> records;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const std::string where = source + " row " + std::to_string(i + 1);
    if (row.size() != 2) {
      throw ParseError(source, i + 1, "expected 2 columns, got " + std::to_string(row.size()));
    }
    records.push_back({row[0], require_label(row[1], where)});
  }
  return Dataset(std::move(records));
}

}  // namespace

Dataset parse_dataset(std::string_view text, DatasetFormat format, const std::string& source) {
  return format == DatasetFormat::Json ? parse_json(text, source) : parse_csv(text, source);
}

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format) {
  return parse_dataset(io::read_file(path), format, path.string());
}

std::string serialize_dataset(const Dataset& dataset, DatasetFormat format) {
  if (format == DatasetFormat::Json) {
    auto doc = nlohmann::json::array();
    for (const auto& record : dataset.records()) {
      nlohmann::json item{{"term", record.term}};
      item["label"] = record.gold ? nlohmann::json(std::string(canonical_name(*record.gold))) : nlohmann::json(nullptr);
      doc.push_back(std::move(item));
    }
    return doc.dump(2) + "\n";
  }
  std::ostringstream out;
  csv::write_row(out, {"term", "label"});
  for (const auto& record : dataset.records()) {
    csv::write_row(out, {record.term, record.gold ? std::string(canonical_name(*record.gold)) : std::string()});
  }
  return out.str();
}

}  // namespace finmatcher
