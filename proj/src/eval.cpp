#include "finmatcher/eval.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "finmatcher/csv.hpp"
#include "finmatcher/errors.hpp"
#include "finmatcher/random.hpp"
#include "finmatcher/smote.hpp"

namespace finmatcher {

std::vector<std::size_t> FoldAssignment::members(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::fold_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (auto f : fold_of) ++sizes.at(f);
  return sizes;
}

FoldAssignment stratified_kfold(std::span<const ClassLabel> golds, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("k must be >= 2");
  if (k > golds.size()) {
    throw ValidationError("k = " + std::to_string(k) + " exceeds the dataset size " + std::to_string(golds.size()));
  }
  FoldAssignment assignment{k, std::vector<std::size_t>(golds.size(), 0)};
  std::size_t next_fold = 0;
  for (auto label : kAllClasses) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < golds.size(); ++i) {
      if (golds[i] == label) members.push_back(i);
    }
    Rng rng(derive_seed(seed, index_of(label)));
    rng.shuffle(std::span<std::size_t>(members));
    for (auto i : members) {
      assignment.fold_of[i] = next_fold;
      next_fold = (next_fold + 1) % k;
    }
  }
  return assignment;
}

std::size_t rank_of(const RankedPrediction& prediction, ClassLabel gold) {
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    if (prediction[i].label == gold) return i + 1;
  }
  throw ValidationError("gold label missing from ranked prediction");
}

namespace {

void check_aligned(std::size_t predictions, std::size_t golds) {
  if (predictions != golds) {
    throw ValidationError("predictions (" + std::to_string(predictions) + ") and gold labels (" +
                          std::to_string(golds) + ") differ in length");
  }
  if (predictions == 0) throw ValidationError("no predictions to score");
}

}  // namespace

double mean_rank(std::span<const RankedPrediction> predictions, std::span<const ClassLabel> golds) {
  check_aligned(predictions.size(), golds.size());
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) total += static_cast<double>(rank_of(predictions[i], golds[i]));
  return total / static_cast<double>(predictions.size());
}

double accuracy(std::span<const RankedPrediction> predictions, std::span<const ClassLabel> golds) {
  check_aligned(predictions.size(), golds.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) hits += predictions[i][0].label == golds[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

EvalReport cross_validate(std::span<const SignalVector> signals, std::span<const ClassLabel> golds,
                          const TrainConfig& config, const CrossValidationOptions& options) {
  config.validate();
  if (signals.size() != golds.size()) throw ValidationError("signals and gold labels differ in length");
  if (options.repeats < 1) throw ValidationError("repeats must be >= 1");

  EvalReport report;
  report.config = config;
  report.options = options;

  for (std::size_t repeat = 0; repeat < options.repeats; ++repeat) {
    const std::uint64_t repeat_seed = config.seed + (options.vary_seed_per_repeat ? repeat : 0);
    const auto folds = stratified_kfold(golds, options.folds, repeat_seed);

    std::vector<RankedPrediction> predictions(signals.size());
    std::size_t trained = 0;
    for (std::size_t fold = 0; fold < options.folds; ++fold) {
      std::vector<Sample> training;
      for (std::size_t i = 0; i < signals.size(); ++i) {
        if (folds.fold_of[i] != fold) training.push_back({signals[i], golds[i]});
      }
      // Synthetic samples are generated from the training split only.
      if (config.smote_enabled) {
        training = smote_upsample(training, config.smote_fraction, config.smote_k, derive_seed(repeat_seed, 1000 + fold))
                       .samples;
      }
      trained += training.size();
      TrainConfig fold_config = config;
      fold_config.seed = derive_seed(repeat_seed, fold);
      DenseModel model;
      try {
        model = train(training, fold_config).model;
      } catch (const TrainingError& e) {
        throw TrainingError("repeat " + std::to_string(repeat) + ", fold " + std::to_string(fold) + ": " + e.reason(),
                            e.epoch(), e.batch());
      }
      for (std::size_t i = 0; i < signals.size(); ++i) {
        if (folds.fold_of[i] == fold) predictions[i] = predict_ranked(model, signals[i]);
      }
    }

    report.accuracy += accuracy(predictions, golds);
    report.mean_rank += mean_rank(predictions, golds);
    std::array<std::size_t, kNumClasses> support{};
    std::array<std::size_t, kNumClasses> correct{};
    for (std::size_t i = 0; i < golds.size(); ++i) {
      ++support[index_of(golds[i])];
      if (predictions[i][0].label == golds[i]) ++correct[index_of(golds[i])];
    }
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      if (support[c]) report.per_class_accuracy[c] += static_cast<double>(correct[c]) / static_cast<double>(support[c]);
    }
    report.evaluated_per_repeat = predictions.size();
    report.trained_per_repeat = trained;
  }

  const auto n = static_cast<double>(options.repeats);
  report.accuracy /= n;
  report.mean_rank /= n;
  for (auto& a : report.per_class_accuracy) a /= n;
  return report;
}

std::vector<SignalVector> zero_group(std::span<const SignalVector> signals, FeatureGroup group) {
  std::vector<SignalVector> out(signals.begin(), signals.end());
  for (auto& s : out) set_group_slice(s, group, ClassVector{});
  return out;
}

std::vector<AblationRow> ablation(std::span<const SignalVector> signals, std::span<const ClassLabel> golds,
                                  const TrainConfig& config, const CrossValidationOptions& options) {
  std::vector<AblationRow> rows;
  rows.push_back({"Submission", cross_validate(signals, golds, config, options)});
  TrainConfig no_smote = config;
  no_smote.smote_enabled = false;
  rows.push_back({"No SMOTE", cross_validate(signals, golds, no_smote, options)});
  for (auto group : kAllGroups) {
    const auto zeroed = zero_group(signals, group);
    rows.push_back({std::string(group_display_name(group)), cross_validate(zeroed, golds, config, options)});
  }
  return rows;
}

std::string report_to_csv(std::span<const AblationRow> rows) {
  std::ostringstream out;
  csv::write_row(out, {"left_out_group", "mean_accuracy", "mean_rank"});
  for (const auto& row : rows) {
    csv::write_row(out, {row.name, csv::format_double(row.report.accuracy), csv::format_double(row.report.mean_rank)});
  }
  return out.str();
}

std::string weight_matrix_to_csv(const std::array<std::array<double, kNumClasses>, kNumGroups>& matrix) {
  std::ostringstream out;
  csv::Row header{"group"};
  for (auto label : kAllClasses) header.emplace_back(canonical_name(label));
  csv::write_row(out, header);
  for (auto group : kAllGroups) {
    csv::Row row{std::string(group_display_name(group))};
    for (double v : matrix[index_of(group)]) row.push_back(csv::format_double(v));
    csv::write_row(out, row);
  }
  return out.str();
}

}  // namespace finmatcher
