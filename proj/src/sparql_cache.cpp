#include "finmatcher/sparql_cache.hpp"

#include <cstdio>
#include <sstream>

#include <openssl/sha.h>

#include <httplib.h>
#include <json.hpp>

#include "finmatcher/errors.hpp"
#include "finmatcher/io.hpp"

namespace finmatcher {
namespace {

constexpr std::string_view kCacheMagic = "#finmatcher-sparql-cache\tv1\t";

std::string_view iri_tail(std::string_view value) {
  if (value.rfind("http://", 0) != 0 && value.rfind("https://", 0) != 0) return value;
  const auto cut = value.find_last_of("/#");
  return cut == std::string_view::npos ? value : value.substr(cut + 1);
}

bool has_tab_or_newline(std::string_view s) { return s.find_first_of("\t\r\n") != std::string_view::npos; }

}  // namespace

std::string hex_digest(std::string_view key) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(key.data()), key.size(), digest);
  std::string out;
  out.reserve(2 * SHA256_DIGEST_LENGTH);
  char byte[3];
  for (unsigned char d : digest) {
    std::snprintf(byte, sizeof byte, "%02x", d);
    out += byte;
  }
  return out;
}

std::string render_query(std::string_view query_template, std::string_view key) {
  const auto colon = key.rfind(':');
  const std::string id(colon == std::string_view::npos ? key : key.substr(colon + 1));
  std::string out(query_template);
  for (const auto& [placeholder, value] : {std::pair<std::string, std::string>{"{id}", id}, {"{key}", std::string(key)}}) {
    for (auto pos = out.find(placeholder); pos != std::string::npos; pos = out.find(placeholder, pos + value.size())) {
      out.replace(pos, placeholder.size(), value);
    }
  }
  return out;
}

std::vector<Triple> parse_sparql_results(std::string_view json_text, std::string_view default_subject) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FetchError(std::string("malformed SPARQL JSON response: ") + e.what());
  }
  const auto bindings = doc.find("results");
  if (bindings == doc.end() || !bindings->contains("bindings") || !(*bindings)["bindings"].is_array()) {
    throw FetchError("SPARQL JSON response has no results.bindings array");
  }
  std::vector<Triple> out;
  for (const auto& row : (*bindings)["bindings"]) {
    auto value_of = [&](const char* var) -> std::optional<std::string> {
      if (!row.contains(var) || !row[var].contains("value")) return std::nullopt;
      return std::string(iri_tail(row[var]["value"].get<std::string>()));
    };
    auto s = value_of("s");
    auto p = value_of("p");
    auto o = value_of("o");
    if (!s && !default_subject.empty()) s = std::string(default_subject);
    if (!s || !p || !o) {
      throw FetchError("SPARQL result row lacks one of the s/p/o bindings");
    }
    out.push_back({*s, *p, *o});
  }
  return out;
}

std::string http_sparql_transport(const std::string& endpoint, const std::string& query) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) throw FetchError("endpoint is not an absolute URL: " + endpoint);
  const auto path_start = endpoint.find('/', scheme_end + 3);
  const std::string host = endpoint.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : endpoint.substr(path_start);

  httplib::Client client(host);
  client.set_follow_location(true);
  client.set_connection_timeout(10);
  client.set_read_timeout(60);
  const httplib::Params params{{"query", query}, {"format", "json"}};
  const httplib::Headers headers{{"Accept", "application/sparql-results+json"},
                                 {"User-Agent", "finmatcher/0.1 (snapshot builder)"}};
  auto response = client.Get(path, params, headers);
  if (!response) {
    throw FetchError("request to " + endpoint + " failed: " + httplib::to_string(response.error()));
  }
  if (response->status != 200) {
    throw FetchError("request to " + endpoint + " returned HTTP " + std::to_string(response->status));
  }
  return response->body;
}

SparqlCache::SparqlCache(std::filesystem::path directory) : directory_(std::move(directory)) {
  std::error_code ec;
  std::filesystem::create_directories(directory_, ec);
  if (ec || !std::filesystem::is_directory(directory_)) {
    throw IoError("cannot create cache directory " + directory_.string());
  }
}

std::filesystem::path SparqlCache::path_for(std::string_view key) const {
  return directory_ / (hex_digest(key) + ".tsv");
}

std::optional<std::vector<Triple>> SparqlCache::load(std::string_view key) const {
  const auto path = path_for(key);
  if (!std::filesystem::exists(path)) return std::nullopt;
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const IoError& e) {
    throw CacheError(std::string(e.what()) + "; delete the entry or re-fetch with refresh");
  }
  auto corrupt = [&](const std::string& why) {
    return CacheError("corrupt cache entry " + path.string() + " for key \"" + std::string(key) + "\": " + why +
                      "; delete it or re-fetch with refresh");
  };
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind(kCacheMagic, 0) != 0) throw corrupt("missing header");
  if (line.substr(kCacheMagic.size()) != key) throw corrupt("entry belongs to another key");
  std::vector<Triple> triples;
  bool terminated = false;
  while (std::getline(in, line)) {
    if (line == "#end") {
      terminated = true;
      break;
    }
    const auto a = line.find('\t');
    const auto b = a == std::string::npos ? a : line.find('\t', a + 1);
    if (b == std::string::npos || line.find('\t', b + 1) != std::string::npos) throw corrupt("malformed triple line");
    triples.push_back({line.substr(0, a), line.substr(a + 1, b - a - 1), line.substr(b + 1)});
  }
  if (!terminated) throw corrupt("truncated entry");
  return triples;
}

void SparqlCache::store(std::string_view key, const std::vector<Triple>& triples) const {
  if (has_tab_or_newline(key)) throw CacheError("cache keys may not contain tabs or newlines");
  std::string out(kCacheMagic);
  out += key;
  out += '\n';
  for (const auto& t : triples) {
    if (has_tab_or_newline(t.subject) || has_tab_or_newline(t.predicate) || has_tab_or_newline(t.object)) {
      throw CacheError("triple field contains a tab or newline");
    }
    out += t.subject + '\t' + t.predicate + '\t' + t.object + '\n';
  }
  out += "#end\n";
  io::write_file_atomic(path_for(key), out);
}

std::vector<Triple> sparql_fetch_and_cache(const std::string& endpoint, std::string_view query_template,
                                           std::string_view key, const SparqlCache& cache,
                                           const FetchOptions& options) {
  if (!options.refresh) {
    if (auto cached = cache.load(key)) return *std::move(cached);
  }
  const auto where = " (endpoint " + endpoint + ", key \"" + std::string(key) + "\")";
  if (!options.allow_network) {
    throw FetchError("cache miss and network access is disabled" + where);
  }
  if (!options.transport) throw FetchError("no transport configured" + where);
  std::vector<Triple> triples;
  try {
    const auto colon = key.rfind(':');
    const auto subject = colon == std::string_view::npos ? key : key.substr(colon + 1);
    triples = parse_sparql_results(options.transport(endpoint, render_query(query_template, key)), subject);
  } catch (const FetchError& e) {
    throw FetchError(e.what() + where);
  } catch (const std::exception& e) {
    throw FetchError(std::string("transport failure: ") + e.what() + where);
  }
  cache.store(key, triples);
  return triples;
}

std::string triples_to_tsv(const std::vector<Triple>& triples) {
  std::string out;
  for (const auto& t : triples) out += t.subject + '\t' + t.predicate + '\t' + t.object + '\n';
  return out;
}

}  // namespace finmatcher
