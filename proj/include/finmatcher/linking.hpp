#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "finmatcher/kgstore.hpp"

namespace finmatcher {

/// Half-open token range [begin, end) of the normalized label.
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t length() const noexcept { return end - begin; }
  bool overlaps(const TokenSpan& other) const noexcept { return begin < other.end && other.begin < end; }
  bool operator==(const TokenSpan&) const = default;
};

/// One linked span. An ambiguous span keeps every concept its text resolves to.
struct SpanLink {
  TokenSpan span;
  ConceptSet concepts;

  bool operator==(const SpanLink&) const = default;
};

struct LinkSet {
  std::vector<SpanLink> links;  // in discovery order
  bool decomposed = false;

  bool empty() const noexcept { return links.empty(); }
  /// Union of all linked concepts.
  ConceptSet concepts() const;
  std::size_t covered_tokens() const;
  bool operator==(const LinkSet&) const = default;
};

using StopwordSet = std::set<std::string, std::less<>>;

StopwordSet default_stopwords();
/// One word per line; blank lines and surrounding whitespace ignored.
StopwordSet load_stopwords(const std::filesystem::path& path);

std::vector<std::string> tokenize(std::string_view normalized);

/// Whole-label lookup first. Failing that, repeatedly links the longest
/// resolvable contiguous n-gram among uncovered tokens (leftmost on ties),
/// never crossing an already linked span. Single stopword tokens are skipped.
LinkSet link(std::string_view label, const KgSnapshot& snapshot, const StopwordSet& stopwords);
LinkSet link(std::string_view label, const KgSnapshot& snapshot);

}  // namespace finmatcher
