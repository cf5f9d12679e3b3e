#include "finmatcher/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "finmatcher/csv.hpp"
#include "finmatcher/dataset.hpp"
#include "finmatcher/errors.hpp"
#include "finmatcher/eval.hpp"
#include "finmatcher/features.hpp"
#include "finmatcher/io.hpp"
#include "finmatcher/model.hpp"
#include "finmatcher/random.hpp"
#include "finmatcher/smote.hpp"
#include "finmatcher/sparql_cache.hpp"

namespace finmatcher::cli {
namespace {

namespace fs = std::filesystem;

/// A configured input could not be found or read.
class ResourceError : public Error {
 public:
  using Error::Error;
};

struct SnapshotPaths {
  std::string triples;
  std::string labels;
};

struct RunConfig {
  std::string dataset;
  std::string dataset_format = "auto";
  SnapshotPaths wordnet;
  SnapshotPaths wikidata;
  SnapshotPaths webisalod;
  std::string embeddings;
  std::size_t embedding_dim = kEmbeddingDim;
  std::string stopwords;
  double confidence_threshold = 0.0;
  std::string cache_dir = ".finmatcher-cache";
  bool allow_network = false;
  std::string model;
  std::string signals;
  std::string output;
  std::string report;
  std::string weights_out;
  unsigned threads = 1;
  TrainConfig train;
  bool no_smote = false;
  std::size_t folds = 5;
  std::size_t repeats = 10;

  // predict
  std::vector<std::string> terms;
  std::string terms_file;

  // fetch-cache
  std::string endpoint = "https://query.wikidata.org/sparql";
  std::string query;
  std::string query_file;
  std::vector<std::string> keys;
  bool refresh = false;
};

fs::path require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw ResourceError("no " + what + " configured");
  if (!fs::is_regular_file(path)) throw ResourceError(what + " not found: " + path);
  return path;
}

template <typename Fn>
auto load_resource(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ResourceError&) {
    throw;
  } catch (const Error& e) {
    throw ResourceError("cannot load " + path + ": " + e.what());
  }
}

Dataset load_configured_dataset(const RunConfig& cfg) {
  const auto path = require_file(cfg.dataset, "dataset");
  DatasetFormat format = format_for_path(path);
  if (cfg.dataset_format == "json") format = DatasetFormat::Json;
  if (cfg.dataset_format == "csv") format = DatasetFormat::Csv;
  return load_resource(cfg.dataset, [&] { return load_dataset(path, format); });
}

std::optional<KgSnapshot> load_snapshot(const SnapshotPaths& paths, Graph graph, const RunConfig& cfg) {
  if (paths.triples.empty()) {
    if (!paths.labels.empty()) throw ResourceError(std::string(graph_name(graph)) + " labels given without triples");
    return std::nullopt;
  }
  const auto triples = require_file(paths.triples, std::string(graph_name(graph)) + " triples");
  fs::path labels;
  if (!paths.labels.empty()) labels = require_file(paths.labels, std::string(graph_name(graph)) + " labels");
  ImportOptions options;
  options.confidence_threshold = cfg.confidence_threshold;
  return load_resource(paths.triples, [&] { return import_triples(triples, labels, graph, options); });
}

FeatureResources load_resources(const RunConfig& cfg) {
  FeatureResources resources;
  resources.wordnet = load_snapshot(cfg.wordnet, Graph::WordNet, cfg);
  resources.wikidata = load_snapshot(cfg.wikidata, Graph::Wikidata, cfg);
  resources.webisalod = load_snapshot(cfg.webisalod, Graph::WebIsALod, cfg);
  if (!cfg.embeddings.empty()) {
    const auto path = require_file(cfg.embeddings, "embedding file");
    resources.embeddings = load_resource(cfg.embeddings, [&] { return load_embeddings(path, cfg.embedding_dim); });
  }
  if (!cfg.stopwords.empty()) {
    const auto path = require_file(cfg.stopwords, "stopword file");
    resources.stopwords = load_resource(cfg.stopwords, [&] { return load_stopwords(path); });
  }
  return resources;
}

TrainConfig effective_train_config(const RunConfig& cfg) {
  TrainConfig train = cfg.train;
  if (cfg.no_smote) train.smote_enabled = false;
  train.validate();
  return train;
}

void write_output(const std::string& path, const std::string& contents, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << contents;
    return;
  }
  io::write_file_atomic(path, contents);
}

/// Signals for every dataset record: read from --signals when that file
/// exists, otherwise extracted from the configured resources.
std::vector<SignalVector> dataset_signals(const RunConfig& cfg, const Dataset& dataset, std::ostream& out) {
  if (!cfg.signals.empty()) {
    const auto path = require_file(cfg.signals, "signal matrix");
    auto table = load_resource(cfg.signals, [&] { return signals_from_csv(io::read_file(path), cfg.signals); });
    if (table.terms.size() != dataset.size()) {
      throw ResourceError("signal matrix " + cfg.signals + " has " + std::to_string(table.terms.size()) +
                          " rows but the dataset has " + std::to_string(dataset.size()) + " records");
    }
    for (std::size_t i = 0; i < table.terms.size(); ++i) {
      if (table.terms[i] != dataset.records()[i].term) {
        throw ResourceError("signal matrix row " + std::to_string(i + 1) + " (\"" + table.terms[i] +
                            "\") does not match dataset term \"" + dataset.records()[i].term + "\"");
      }
    }
    return std::move(table.signals);
  }
  const auto resources = load_resources(cfg);
  FeatureExtractor extractor(resources);
  ExtractionDiagnostics diagnostics;
  auto signals = extractor.extract(terms_of(dataset), &diagnostics, cfg.threads);
  out << diagnostics.summary();
  return signals;
}

std::vector<Sample> to_samples(std::span<const SignalVector> signals, std::span<const ClassLabel> golds) {
  std::vector<Sample> samples;
  samples.reserve(signals.size());
  for (std::size_t i = 0; i < signals.size(); ++i) samples.push_back({signals[i], golds[i]});
  return samples;
}

TrainResult fit_full(std::span<const SignalVector> signals, std::span<const ClassLabel> golds,
                     const TrainConfig& train_cfg, std::ostream& err) {
  auto samples = to_samples(signals, golds);
  if (train_cfg.smote_enabled) {
    auto upsampled = smote_upsample(samples, train_cfg.smote_fraction, train_cfg.smote_k, derive_seed(train_cfg.seed, 7));
    for (auto label : upsampled.duplicated_classes) {
      err << "warning: class " << canonical_name(label) << " has a single record; upsampled by duplication\n";
    }
    samples = std::move(upsampled.samples);
  }
  return train(samples, train_cfg);
}

std::string fixed(double v, int precision = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

// ---------------------------------------------------------------------------

int cmd_extract(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto dataset = load_configured_dataset(cfg);
  const auto resources = load_resources(cfg);
  FeatureExtractor extractor(resources);
  ExtractionDiagnostics diagnostics;
  const auto terms = terms_of(dataset);
  const auto signals = extractor.extract(terms, &diagnostics, cfg.threads);
  const auto target = !cfg.output.empty() ? cfg.output : cfg.signals;
  write_output(target, signals_to_csv(terms, signals), out);
  std::ostream& log = target.empty() || target == "-" ? err : out;
  log << diagnostics.summary();
  return kSuccess;
}

int cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto train_cfg = effective_train_config(cfg);
  if (cfg.model.empty()) throw ValidationError("--model is required for train");
  const auto dataset = load_configured_dataset(cfg);
  const auto golds = dataset.golds();
  const auto signals = dataset_signals(cfg, dataset, out);
  const auto result = fit_full(signals, golds, train_cfg, err);
  io::write_file_atomic(cfg.model, model_to_json(result.model, train_cfg));
  out << "final_loss: " << csv::format_double(result.final_loss) << '\n';
  out << "group_weight_sums:";
  for (double s : group_weight_sums(result.model)) out << ' ' << csv::format_double(s);
  out << '\n';
  return kSuccess;
}

int cmd_predict(const RunConfig& cfg, std::ostream& out) {
  const auto model_path = require_file(cfg.model, "model file");
  const auto model = load_resource(cfg.model, [&] { return model_from_json(io::read_file(model_path), cfg.model); });

  std::vector<std::string> terms = cfg.terms;
  if (!cfg.terms_file.empty()) {
    const auto path = require_file(cfg.terms_file, "terms file");
    std::istringstream in(io::read_file(path));
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) terms.push_back(line);
    }
  }
  if (terms.empty() && cfg.terms_file.empty() && !cfg.dataset.empty()) terms = terms_of(load_configured_dataset(cfg));

  const auto resources = load_resources(cfg);
  FeatureExtractor extractor(resources);
  const auto signals = extractor.extract(terms, nullptr, cfg.threads);
  auto doc = nlohmann::json::array();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto ranked = predict_ranked(model.model, signals[i]);
    auto labels = nlohmann::json::array();
    auto scores = nlohmann::json::array();
    for (const auto& entry : ranked) {
      labels.push_back(std::string(canonical_name(entry.label)));
      scores.push_back(entry.score);
    }
    doc.push_back({{"term", terms[i]}, {"ranked_labels", labels}, {"scores", scores}});
  }
  write_output(cfg.output, doc.dump(2) + "\n", out);
  return kSuccess;
}

int cmd_evaluate(const RunConfig& cfg, bool ablate, std::ostream& out, std::ostream& err) {
  const auto train_cfg = effective_train_config(cfg);
  const auto dataset = load_configured_dataset(cfg);
  const auto golds = dataset.golds();
  std::ostream& log = cfg.report.empty() || cfg.report == "-" ? err : out;
  const auto signals = dataset_signals(cfg, dataset, log);
  const CrossValidationOptions options{cfg.folds, cfg.repeats, true};

  std::vector<AblationRow> rows;
  if (ablate) {
    rows = ablation(signals, golds, train_cfg, options);
  } else {
    rows.push_back({"Submission", cross_validate(signals, golds, train_cfg, options)});
  }
  write_output(cfg.report, report_to_csv(rows), out);

  const auto full = fit_full(signals, golds, train_cfg, err);
  const auto matrix = group_class_weight_matrix(full.model);
  if (!cfg.weights_out.empty()) write_output(cfg.weights_out, weight_matrix_to_csv(matrix), out);

  for (const auto& row : rows) {
    log << std::left << std::setw(20) << row.name << " accuracy " << fixed(row.report.accuracy) << "  mean rank "
        << fixed(row.report.mean_rank, 3) << '\n';
  }
  return kSuccess;
}

int cmd_fetch_cache(const RunConfig& cfg, std::ostream& out) {
  if (cfg.keys.empty()) throw ValidationError("fetch-cache needs at least one --key");
  std::string query = cfg.query;
  if (!cfg.query_file.empty()) query = io::read_file(require_file(cfg.query_file, "query template"));
  if (query.empty()) throw ValidationError("fetch-cache needs --query or --query-file");
  const SparqlCache cache(cfg.cache_dir);
  FetchOptions options;
  options.allow_network = cfg.allow_network;
  options.refresh = cfg.refresh;
  std::vector<Triple> all;
  for (const auto& key : cfg.keys) {
    const auto triples = sparql_fetch_and_cache(cfg.endpoint, query, key, cache, options);
    out << key << '\t' << triples.size() << " triples\t" << cache.path_for(key).filename().string() << '\n';
    all.insert(all.end(), triples.begin(), triples.end());
  }
  if (!cfg.output.empty()) io::write_file_atomic(cfg.output, triples_to_tsv(all));
  return kSuccess;
}

void add_shared_options(CLI::App& app, RunConfig& cfg) {
  app.add_option("--dataset", cfg.dataset, "Term/label file (JSON or CSV)");
  app.add_option("--dataset-format", cfg.dataset_format, "json, csv or auto (by extension)")
      ->check(CLI::IsMember({"auto", "json", "csv"}));
  app.add_option("--wordnet-triples", cfg.wordnet.triples, "WordNet triple TSV");
  app.add_option("--wordnet-labels", cfg.wordnet.labels, "WordNet label TSV");
  app.add_option("--wikidata-triples", cfg.wikidata.triples, "Wikidata triple TSV");
  app.add_option("--wikidata-labels", cfg.wikidata.labels, "Wikidata label TSV");
  app.add_option("--webisalod-triples", cfg.webisalod.triples, "WebIsALOD triple TSV");
  app.add_option("--webisalod-labels", cfg.webisalod.labels, "WebIsALOD label TSV");
  app.add_option("--embeddings", cfg.embeddings, "WebIsALOD concept vectors (word2vec text format)");
  app.add_option("--embedding-dim", cfg.embedding_dim, "Embedding dimension")->check(CLI::PositiveNumber);
  app.add_option("--stopwords", cfg.stopwords, "Stopword list, one per line");
  app.add_option("--confidence-threshold", cfg.confidence_threshold, "Drop WebIsA edges below this confidence");
  app.add_option("--cache-dir", cfg.cache_dir, "SPARQL cache directory");
  app.add_flag("--allow-network", cfg.allow_network, "Permit SPARQL requests on cache misses");
  app.add_option("--model", cfg.model, "Model JSON path");
  app.add_option("--signals", cfg.signals, "Signal matrix CSV");
  app.add_option("-o,--output", cfg.output, "Output path (stdout when omitted)");
  app.add_option("--report", cfg.report, "Evaluation report CSV");
  app.add_option("--weights-out", cfg.weights_out, "Group x class weight matrix CSV");
  app.add_option("--threads", cfg.threads, "Feature extraction threads (0 = all cores)");
  app.add_option("--epochs", cfg.train.epochs)->check(CLI::NonNegativeNumber);
  app.add_option("--batch-size", cfg.train.batch_size)->check(CLI::PositiveNumber);
  app.add_option("--learning-rate", cfg.train.learning_rate)->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.train.seed);
  app.add_flag("--no-smote", cfg.no_smote, "Disable SMOTE upsampling");
  app.add_option("--smote-fraction", cfg.train.smote_fraction, "Upsampling barrier as a fraction of the majority class");
  app.add_option("--smote-k", cfg.train.smote_k)->check(CLI::PositiveNumber);
  app.add_option("--folds", cfg.folds)->check(CLI::Range(2, 1000));
  app.add_option("--repeats", cfg.repeats)->check(CLI::PositiveNumber);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Hypernym classification over knowledge-graph features", "finmatcher"};
  app.set_config("--config", "", "TOML-style key = value file; command-line flags take precedence");
  app.require_subcommand(1);
  add_shared_options(app, cfg);

  auto* extract = app.add_subcommand("extract", "Write the 50-column signal matrix");
  auto* train_cmd = app.add_subcommand("train", "Train and persist a model");
  auto* predict = app.add_subcommand("predict", "Rank the ten classes for input terms");
  predict->add_option("--term", cfg.terms, "Term to classify (repeatable)");
  predict->add_option("--terms-file", cfg.terms_file, "File of terms, one per line");
  auto* evaluate = app.add_subcommand("evaluate", "Repeated stratified cross-validation");
  auto* ablate = app.add_subcommand("ablate", "Cross-validation with each feature group left out");
  auto* fetch = app.add_subcommand("fetch-cache", "Populate the SPARQL cache and optionally write a triple TSV");
  fetch->add_option("--endpoint", cfg.endpoint, "SPARQL endpoint URL");
  fetch->add_option("--query", cfg.query, "Query template; {id} and {key} are substituted");
  fetch->add_option("--query-file", cfg.query_file, "File holding the query template");
  fetch->add_option("--key", cfg.keys, "Cache key such as hypernyms:Q25323628 (repeatable)");
  fetch->add_flag("--refresh", cfg.refresh, "Re-fetch even when cached");
  for (auto* sub : {extract, train_cmd, predict, evaluate, ablate, fetch}) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (extract->parsed()) return cmd_extract(cfg, out, err);
    if (train_cmd->parsed()) return cmd_train(cfg, out, err);
    if (predict->parsed()) return cmd_predict(cfg, out);
    if (evaluate->parsed()) return cmd_evaluate(cfg, false, out, err);
    if (ablate->parsed()) return cmd_evaluate(cfg, true, out, err);
    if (fetch->parsed()) return cmd_fetch_cache(cfg, out);
  } catch (const TrainingError& e) {
    err << "error: " << e.what() << '\n';
    return kNumeric;
  } catch (const ResourceError& e) {
    err << "error: " << e.what() << '\n';
    return kResource;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kResource;
  } catch (const FetchError& e) {
    err << "error: " << e.what() << '\n';
    return kResource;
  } catch (const CacheError& e) {
    err << "error: " << e.what() << '\n';
    return kResource;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace finmatcher::cli
