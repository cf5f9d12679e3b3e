#include "finmatcher/linking.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

#include "finmatcher/dataset.hpp"
#include "finmatcher/io.hpp"

namespace finmatcher {

ConceptSet LinkSet::concepts() const {
  ConceptSet out;
  for (const auto& link : links) out.insert(link.concepts.begin(), link.concepts.end());
  return out;
}

std::size_t LinkSet::covered_tokens() const {
  std::size_t n = 0;
  for (const auto& link : links) n += link.span.length();
  return n;
}

StopwordSet default_stopwords() { return {"of", "the", "and", "for", "in", "on"}; }

StopwordSet load_stopwords(const std::filesystem::path& path) {
  StopwordSet out;
  std::istringstream in(io::read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    auto word = normalize_label(line);
    if (!word.empty()) out.insert(std::move(word));
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view normalized) {
  std::vector<std::string> tokens;
  std::istringstream in{std::string(normalized)};
  std::string token;
  while (in >> token) tokens.push_back(std::move(token));
  return tokens;
}

LinkSet link(std::string_view label, const KgSnapshot& snapshot, const StopwordSet& stopwords) {
  const auto normalized = normalize_label(label);
  const auto tokens = tokenize(normalized);
  if (!tokens.empty() && snapshot.has_label(normalized)) {
    return {{SpanLink{{0, tokens.size()}, snapshot.lookup_label(normalized)}}, false};
  }

  auto ngram = [&](std::size_t begin, std::size_t len) {
    std::string text = tokens[begin];
    for (std::size_t i = begin + 1; i < begin + len; ++i) text += ' ' + tokens[i];
    return normalize_label(text);
  };

  LinkSet result{{}, true};
  std::vector<TokenSpan> open{{0, tokens.size()}};  // uncovered runs, left to right
  while (!open.empty()) {
    std::size_t longest = 0;
    for (const auto& run : open) longest = std::max(longest, run.length());

    std::optional<std::pair<std::size_t, TokenSpan>> hit;  // (run index, span)
    for (std::size_t len = longest; len >= 1 && !hit; --len) {
      for (std::size_t r = 0; r < open.size() && !hit; ++r) {
        const auto& run = open[r];
        for (std::size_t begin = run.begin; begin + len <= run.end; ++begin) {
          if (len == 1 && (stopwords.count(tokens[begin]) || stopwords.count(ngram(begin, 1)))) continue;
          if (snapshot.has_label(ngram(begin, len))) {
            hit = {r, TokenSpan{begin, begin + len}};
            break;
          }
        }
      }
    }
    if (!hit) break;

    const auto [r, span] = *hit;
    result.links.push_back({span, snapshot.lookup_label(ngram(span.begin, span.length()))});
    const auto run = open[r];
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(r));
    if (span.end < run.end) open.insert(open.begin() + static_cast<std::ptrdiff_t>(r), {span.end, run.end});
    if (run.begin < span.begin) open.insert(open.begin() + static_cast<std::ptrdiff_t>(r), {run.begin, span.begin});
  }
  return result;
}

LinkSet link(std::string_view label, const KgSnapshot& snapshot) {
  static const StopwordSet defaults = default_stopwords();
  return link(label, snapshot, defaults);
}

}  // namespace finmatcher
