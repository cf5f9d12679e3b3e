#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>

#include "finmatcher/dataset.hpp"
#include "finmatcher/embeddings.hpp"
#include "finmatcher/errors.hpp"
#include "finmatcher/eval.hpp"
#include "finmatcher/features.hpp"
#include "finmatcher/kgstore.hpp"
#include "finmatcher/linking.hpp"
#include "finmatcher/model.hpp"
#include "finmatcher/smote.hpp"

namespace py = pybind11;
using namespace finmatcher;

namespace {

using Record = std::pair<std::string, std::optional<ClassLabel>>;

std::vector<Record> records_of(const Dataset& dataset) {
  std::vector<Record> out;
  for (const auto& r : dataset.records()) out.emplace_back(r.term, r.gold);
  return out;
}

DatasetFormat format_from(const std::string& name, const std::filesystem::path& path) {
  if (name == "json") return DatasetFormat::Json;
  if (name == "csv") return DatasetFormat::Csv;
  if (name == "auto") return format_for_path(path);
  throw ValidationError("unknown dataset format \"" + name + "\"");
}

ConceptSet concepts(Graph graph, const std::vector<std::string>& ids) {
  ConceptSet out;
  for (const auto& id : ids) out.insert(ConceptId{graph, id});
  return out;
}

std::vector<std::string> ids_of(const ConceptSet& set) {
  std::vector<std::string> out;
  for (const auto& c : set) out.push_back(c.local_id);
  return out;
}

std::vector<Sample> samples_of(const std::vector<SignalVector>& signals, const std::vector<ClassLabel>& labels) {
  if (signals.size() != labels.size()) throw ValidationError("signals and labels differ in length");
  std::vector<Sample> out(signals.size());
  for (std::size_t i = 0; i < signals.size(); ++i) out[i] = {signals[i], labels[i]};
  return out;
}

ImportOptions import_options(double confidence_threshold, std::optional<bool> id_labels) {
  ImportOptions options;
  options.confidence_threshold = confidence_threshold;
  options.id_labels = id_labels;
  return options;
}

/// Owns the resources the extractor points into.
struct PyExtractor {
  FeatureResources resources;
  std::unique_ptr<FeatureExtractor> extractor;
};

}  // namespace

PYBIND11_MODULE(_finmatcher, m) {
  m.doc() = "Hypernym classification of financial terms over knowledge-graph features";

  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<IoError>(m, "IoError", error);
  py::register_exception<ValidationError>(m, "ValidationError", error);
  py::register_exception<ParseError>(m, "ParseError", error);
  py::register_exception<NotFoundError>(m, "NotFoundError", error);
  py::register_exception<FetchError>(m, "FetchError", error);
  py::register_exception<CacheError>(m, "CacheError", error);
  py::register_exception<TrainingError>(m, "TrainingError", error);

  m.attr("NUM_CLASSES") = kNumClasses;
  m.attr("SIGNAL_SIZE") = kSignalSize;

  py::enum_<ClassLabel>(m, "ClassLabel")
      .value("EquityIndex", ClassLabel::EquityIndex)
      .value("CreditIndex", ClassLabel::CreditIndex)
      .value("Bonds", ClassLabel::Bonds)
      .value("Swap", ClassLabel::Swap)
      .value("Option", ClassLabel::Option)
      .value("Funds", ClassLabel::Funds)
      .value("Future", ClassLabel::Future)
      .value("MMIs", ClassLabel::MMIs)
      .value("Stocks", ClassLabel::Stocks)
      .value("Forward", ClassLabel::Forward);

  py::enum_<Graph>(m, "Graph")
      .value("WordNet", Graph::WordNet)
      .value("Wikidata", Graph::Wikidata)
      .value("WebIsALod", Graph::WebIsALod);

  py::enum_<FeatureGroup>(m, "FeatureGroup")
      .value("Overlap", FeatureGroup::Overlap)
      .value("Wikidata", FeatureGroup::Wikidata)
      .value("WordNet", FeatureGroup::WordNet)
      .value("WebIsALodHypernyms", FeatureGroup::WebIsALodHypernyms)
      .value("WebIsALodRdf2vec", FeatureGroup::WebIsALodRdf2vec);

  m.def("class_names", [] {
    std::vector<std::string> out;
    for (auto label : kAllClasses) out.emplace_back(canonical_name(label));
    return out;
  });
  m.def("canonical_name", [](ClassLabel label) { return std::string(canonical_name(label)); });
  m.def("parse_class_label", &parse_class_label, py::arg("text"));
  m.def("normalize_label", &normalize_label, py::arg("text"));
  m.def("group_display_name", [](FeatureGroup g) { return std::string(group_display_name(g)); });

  m.def(
      "load_dataset",
      [](const std::filesystem::path& path, const std::string& format) {
        return records_of(load_dataset(path, format_from(format, path)));
      },
      py::arg("path"), py::arg("format") = "auto", "List of (term, ClassLabel or None).");
  m.def(
      "parse_dataset",
      [](const std::string& text, const std::string& format) {
        return records_of(parse_dataset(text, format_from(format, "x.json")));
      },
      py::arg("text"), py::arg("format") = "json");

  py::class_<KgSnapshot>(m, "KgSnapshot")
      .def_property_readonly("graph", &KgSnapshot::graph)
      .def_property_readonly("node_count", &KgSnapshot::node_count)
      .def_property_readonly("edge_count", &KgSnapshot::edge_count)
      .def("contains", [](const KgSnapshot& s, const std::string& id) { return s.contains({s.graph(), id}); })
      .def("lookup_label",
           [](const KgSnapshot& s, const std::string& label) { return ids_of(lookup_label(s, label)); })
      .def(
          "hypernym_within",
          [](const KgSnapshot& s, const std::string& start, const std::vector<std::string>& targets,
             int max_hops) -> std::optional<int> {
            const auto hit = hypernym_within(s, {s.graph(), start}, concepts(s.graph(), targets), max_hops);
            return hit.hops;
          },
          py::arg("start"), py::arg("targets"), py::arg("max_hops"),
          "Fewest hops to any target, or None beyond max_hops.");

  m.def(
      "parse_triples",
      [](const std::string& triples, const std::string& labels, Graph graph, double confidence_threshold,
         std::optional<bool> id_labels) {
        return parse_triples(triples, labels, graph, import_options(confidence_threshold, id_labels));
      },
      py::arg("triples"), py::arg("labels") = "", py::arg("graph"), py::arg("confidence_threshold") = 0.0,
      py::arg("id_labels") = py::none());
  m.def(
      "import_triples",
      [](const std::filesystem::path& triples, const std::optional<std::filesystem::path>& labels, Graph graph,
         double confidence_threshold, std::optional<bool> id_labels) {
        return import_triples(triples, labels.value_or(std::filesystem::path{}), graph,
                              import_options(confidence_threshold, id_labels));
      },
      py::arg("triples_path"), py::arg("labels_path") = py::none(), py::arg("graph"),
      py::arg("confidence_threshold") = 0.0, py::arg("id_labels") = py::none());

  py::class_<LinkSet>(m, "LinkSet")
      .def_property_readonly("links",
                             [](const LinkSet& l) {
                               std::vector<std::tuple<std::size_t, std::size_t, std::vector<std::string>>> out;
                               for (const auto& s : l.links) out.emplace_back(s.span.begin, s.span.end, ids_of(s.concepts));
                               return out;
                             })
      .def_readonly("decomposed", &LinkSet::decomposed)
      .def("concepts", [](const LinkSet& l) { return ids_of(l.concepts()); })
      .def("covered_tokens", &LinkSet::covered_tokens)
      .def("__len__", [](const LinkSet& l) { return l.links.size(); });

  m.def(
      "link",
      [](const std::string& label, const KgSnapshot& snapshot, std::optional<std::vector<std::string>> stopwords) {
        if (!stopwords) return link(label, snapshot);
        return link(label, snapshot, StopwordSet(stopwords->begin(), stopwords->end()));
      },
      py::arg("label"), py::arg("snapshot"), py::arg("stopwords") = py::none());
  m.def("tokenize", &tokenize, py::arg("normalized"));

  py::class_<EmbeddingStore>(m, "EmbeddingStore")
      .def(py::init<std::size_t>(), py::arg("dimension") = kEmbeddingDim)
      .def_property_readonly("dimension", &EmbeddingStore::dimension)
      .def("__len__", &EmbeddingStore::size)
      .def("insert",
           [](EmbeddingStore& s, const std::string& id, std::vector<double> v) {
             s.insert({Graph::WebIsALod, id}, std::move(v));
           })
      .def("get", [](const EmbeddingStore& s, const std::string& id) -> std::optional<std::vector<double>> {
        const auto* v = s.find({Graph::WebIsALod, id});
        if (!v) return std::nullopt;
        return *v;
      });
  m.def("load_embeddings", &load_embeddings, py::arg("path"), py::arg("dimension") = kEmbeddingDim);
  m.def(
      "parse_embeddings", [](const std::string& text, std::size_t dim) { return parse_embeddings(text, dim); },
      py::arg("text"), py::arg("dimension") = kEmbeddingDim);
  m.def(
      "cosine", [](const std::vector<double>& a, const std::vector<double>& b) { return cosine(a, b); },
      py::arg("a"), py::arg("b"), "Cosine similarity, None when either vector has zero norm.");
  m.def(
      "linkset_similarity",
      [](const std::vector<std::string>& hyponyms, const std::vector<std::string>& hypernyms,
         const EmbeddingStore& store) {
        return linkset_similarity(concepts(Graph::WebIsALod, hyponyms), concepts(Graph::WebIsALod, hypernyms), store);
      },
      py::arg("hyponyms"), py::arg("hypernyms"), py::arg("store"));

  m.def("overlap_feature", &overlap_feature, py::arg("term"));

  py::class_<PyExtractor>(m, "FeatureExtractor")
      .def(py::init([](std::optional<KgSnapshot> wordnet, std::optional<KgSnapshot> wikidata,
                       std::optional<KgSnapshot> webisalod, std::optional<EmbeddingStore> embeddings,
                       std::optional<std::vector<std::string>> stopwords) {
             auto p = std::make_unique<PyExtractor>();
             p->resources.wordnet = std::move(wordnet);
             p->resources.wikidata = std::move(wikidata);
             p->resources.webisalod = std::move(webisalod);
             p->resources.embeddings = std::move(embeddings);
             if (stopwords) p->resources.stopwords = StopwordSet(stopwords->begin(), stopwords->end());
             p->extractor = std::make_unique<FeatureExtractor>(p->resources);
             return p;
           }),
           py::kw_only(), py::arg("wordnet") = py::none(), py::arg("wikidata") = py::none(),
           py::arg("webisalod") = py::none(), py::arg("embeddings") = py::none(), py::arg("stopwords") = py::none())
      .def(
          "build_signal", [](const PyExtractor& p, const std::string& term) { return p.extractor->build_signal(term); },
          py::arg("term"))
      .def(
          "extract",
          [](const PyExtractor& p, const std::vector<std::string>& terms, unsigned threads) {
            py::gil_scoped_release release;
            return p.extractor->extract(terms, nullptr, threads);
          },
          py::arg("terms"), py::arg("threads") = 1);

  m.def("smote_threshold", &smote_threshold, py::arg("majority_count"), py::arg("fraction"));
  m.def(
      "smote_upsample",
      [](const std::vector<SignalVector>& signals, const std::vector<ClassLabel>& labels, double fraction, int k,
         std::uint64_t seed) {
        const auto result = smote_upsample(samples_of(signals, labels), fraction, k, seed);
        std::vector<SignalVector> out_signals;
        std::vector<ClassLabel> out_labels;
        for (const auto& s : result.samples) {
          out_signals.push_back(s.signal);
          out_labels.push_back(s.label);
        }
        return py::make_tuple(out_signals, out_labels);
      },
      py::arg("signals"), py::arg("labels"), py::arg("fraction") = 1.0 / 3.0, py::arg("k") = 5, py::arg("seed") = 42);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("smote_enabled", &TrainConfig::smote_enabled)
      .def_readwrite("smote_fraction", &TrainConfig::smote_fraction)
      .def_readwrite("smote_k", &TrainConfig::smote_k)
      .def("validate", &TrainConfig::validate)
      .def("__eq__", [](const TrainConfig& a, const TrainConfig& b) { return a == b; });

  py::class_<DenseModel>(m, "DenseModel")
      .def(py::init<>())
      .def_static("initialize", &DenseModel::initialize, py::arg("seed"))
      .def_readwrite("weights", &DenseModel::weights)
      .def_readwrite("bias", &DenseModel::bias)
      .def("forward", [](const DenseModel& model, const SignalVector& s) { return forward(model, s); })
      .def("__eq__", [](const DenseModel& a, const DenseModel& b) { return a == b; });

  m.def(
      "train",
      [](const std::vector<SignalVector>& signals, const std::vector<ClassLabel>& labels, const TrainConfig& config) {
        const auto samples = samples_of(signals, labels);
        py::gil_scoped_release release;
        const auto result = train(samples, config);
        return std::make_pair(result.model, result.final_loss);
      },
      py::arg("signals"), py::arg("labels"), py::arg("config") = TrainConfig{},
      "Plain mini-batch training without upsampling. Returns (model, final_loss).");

  py::class_<RankedEntry>(m, "RankedEntry")
      .def_readonly("label", &RankedEntry::label)
      .def_readonly("score", &RankedEntry::score)
      .def("__repr__", [](const RankedEntry& e) {
        return "RankedEntry(" + std::string(canonical_name(e.label)) + ", " + std::to_string(e.score) + ")";
      });
  m.def("predict_ranked", &predict_ranked, py::arg("model"), py::arg("signal"));
  m.def("rank_scores", &rank_scores, py::arg("scores"));
  m.def("group_weight_sums", &group_weight_sums, py::arg("model"));
  m.def("group_class_weight_matrix", &group_class_weight_matrix, py::arg("model"));
  m.def("model_to_json", &model_to_json, py::arg("model"), py::arg("config") = TrainConfig{});
  m.def(
      "model_from_json",
      [](const std::string& text) {
        auto file = model_from_json(text);
        return std::make_pair(file.model, file.config);
      },
      py::arg("text"));

  m.def(
      "stratified_kfold",
      [](const std::vector<ClassLabel>& golds, std::size_t k, std::uint64_t seed) {
        return stratified_kfold(golds, k, seed).fold_of;
      },
      py::arg("golds"), py::arg("k"), py::arg("seed"), "Fold id per record.");
  m.def(
      "mean_rank",
      [](const std::vector<RankedPrediction>& predictions, const std::vector<ClassLabel>& golds) {
        return mean_rank(predictions, golds);
      },
      py::arg("predictions"), py::arg("golds"));
  m.def(
      "accuracy",
      [](const std::vector<RankedPrediction>& predictions, const std::vector<ClassLabel>& golds) {
        return accuracy(predictions, golds);
      },
      py::arg("predictions"), py::arg("golds"));

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("accuracy", &EvalReport::accuracy)
      .def_readonly("mean_rank", &EvalReport::mean_rank)
      .def_readonly("per_class_accuracy", &EvalReport::per_class_accuracy)
      .def_readonly("evaluated_per_repeat", &EvalReport::evaluated_per_repeat)
      .def_readonly("trained_per_repeat", &EvalReport::trained_per_repeat)
      .def_readonly("config", &EvalReport::config);

  auto cv_options = [](std::size_t folds, std::size_t repeats, bool vary) {
    return CrossValidationOptions{folds, repeats, vary};
  };
  m.def(
      "cross_validate",
      [cv_options](const std::vector<SignalVector>& signals, const std::vector<ClassLabel>& golds,
                   const TrainConfig& config, std::size_t folds, std::size_t repeats, bool vary_seed_per_repeat) {
        py::gil_scoped_release release;
        return cross_validate(signals, golds, config, cv_options(folds, repeats, vary_seed_per_repeat));
      },
      py::arg("signals"), py::arg("golds"), py::arg("config") = TrainConfig{}, py::arg("folds") = 5,
      py::arg("repeats") = 10, py::arg("vary_seed_per_repeat") = true);
  m.def(
      "ablation",
      [cv_options](const std::vector<SignalVector>& signals, const std::vector<ClassLabel>& golds,
                   const TrainConfig& config, std::size_t folds, std::size_t repeats) {
        std::vector<AblationRow> rows;
        {
          py::gil_scoped_release release;
          rows = ablation(signals, golds, config, cv_options(folds, repeats, true));
        }
        std::vector<std::pair<std::string, EvalReport>> out;
        for (auto& r : rows) out.emplace_back(r.name, r.report);
        return out;
      },
      py::arg("signals"), py::arg("golds"), py::arg("config") = TrainConfig{}, py::arg("folds") = 5,
      py::arg("repeats") = 10, "List of (row name, EvalReport).");
}
