#include "finmatcher/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "finmatcher/errors.hpp"
#include "finmatcher/io.hpp"

namespace finmatcher {

void EmbeddingStore::insert(const ConceptId& concept_id, std::vector<double> values) {
  if (values.size() != dimension_) {
    throw ValidationError("vector for \"" + concept_id.local_id + "\" has " + std::to_string(values.size()) +
                          " entries, expected " + std::to_string(dimension_));
  }
  if (!std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); })) {
    throw ValidationError("vector for \"" + concept_id.local_id + "\" has a non-finite entry");
  }
  auto [it, inserted] = vectors_.insert_or_assign(concept_id, std::move(values));
  if (!inserted) ++duplicates_;
}

const std::vector<double>* EmbeddingStore::find(const ConceptId& concept_id) const {
  auto it = vectors_.find(concept_id);
  return it == vectors_.end() ? nullptr : &it->second;
}

void EmbeddingStore::scale(double factor) {
  for (auto& [id, values] : vectors_) {
    for (auto& v : values) v *= factor;
  }
}

EmbeddingStore parse_embeddings(std::string_view text, std::size_t dimension, const std::string& source) {
  EmbeddingStore store(dimension);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::vector<std::string_view> fields;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    fields.clear();
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
      const auto start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
      if (i > start) fields.push_back(line.substr(start, i - start));
    }
    if (fields.empty()) continue;

    if (line_no == 1 && fields.size() == 2) {
      // word2vec header: "<count> <dim>"
      std::size_t count = 0;
      std::size_t dim = 0;
      auto r1 = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), count);
      auto r2 = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), dim);
      if (r1.ec == std::errc() && r2.ec == std::errc() && r1.ptr == fields[0].data() + fields[0].size() &&
          r2.ptr == fields[1].data() + fields[1].size()) {
        if (dim != dimension) {
          throw ParseError(source, line_no, "header declares dimension " + std::to_string(dim) + ", expected " +
                                                std::to_string(dimension));
        }
        continue;
      }
    }
    if (fields.size() != dimension + 1) {
      throw ParseError(source, line_no, "expected token plus " + std::to_string(dimension) + " numbers, got " +
                                            std::to_string(fields.size() - 1));
    }
    std::vector<double> values(dimension);
    for (std::size_t d = 0; d < dimension; ++d) {
      const auto field = fields[d + 1];
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), values[d]);
      if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(values[d])) {
        throw ParseError(source, line_no, "invalid number \"" + std::string(field) + "\"");
      }
    }
    const auto id = normalize_concept_id(Graph::WebIsALod, fields[0]);
    if (id.empty()) throw ParseError(source, line_no, "empty token");
    store.insert({Graph::WebIsALod, id}, std::move(values));
  }
  return store;
}

EmbeddingStore load_embeddings(const std::filesystem::path& path, std::size_t dimension) {
  return parse_embeddings(io::read_file(path), dimension, path.string());
}

std::optional<double> cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("cosine of vectors with different dimensions");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return std::nullopt;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double linkset_similarity(const ConceptSet& hyponym_links, const ConceptSet& hypernym_links,
                          const EmbeddingStore& store, SimilarityStats* stats) {
  std::vector<const std::vector<double>*> hyponyms;
  std::vector<const std::vector<double>*> hypernyms;
  SimilarityStats local;
  for (const auto& id : hyponym_links) {
    if (const auto* v = store.find(id)) hyponyms.push_back(v);
    else ++local.hyponym_dropped;
  }
  for (const auto& id : hypernym_links) {
    if (const auto* v = store.find(id)) hypernyms.push_back(v);
    else ++local.hypernym_dropped;
  }
  if (stats) *stats = local;
  if (hyponyms.empty() || hypernyms.empty()) return 0.0;

  double total = 0.0;
  for (const auto* vi : hyponyms) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto* vj : hypernyms) best = std::max(best, cosine(*vi, *vj).value_or(0.0));
    total += best;
  }
  return total / static_cast<double>(hyponyms.size());
}

double linkset_similarity(const LinkSet& hyponym_links, const LinkSet& hypernym_links, const EmbeddingStore& store,
                          SimilarityStats* stats) {
  return linkset_similarity(hyponym_links.concepts(), hypernym_links.concepts(), store, stats);
}

}  // namespace finmatcher
