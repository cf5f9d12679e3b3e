#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "finmatcher/dataset.hpp"
#include "finmatcher/features.hpp"
#include "finmatcher/model.hpp"

namespace finmatcher {

struct FoldAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> fold_of;  // record index -> fold id

  std::vector<std::size_t> members(std::size_t fold) const;
  std::vector<std::size_t> fold_sizes() const;
};

/// Seeded shuffle inside each class, then round-robin over folds. The
/// round-robin position carries over from one class to the next so overall
/// fold sizes also differ by at most one. ValidationError if k < 2 or k > n.
FoldAssignment stratified_kfold(std::span<const ClassLabel> golds, std::size_t k, std::uint64_t seed);

/// 1-based position of `gold` in `prediction`.
std::size_t rank_of(const RankedPrediction& prediction, ClassLabel gold);

double mean_rank(std::span<const RankedPrediction> predictions, std::span<const ClassLabel> golds);
double accuracy(std::span<const RankedPrediction> predictions, std::span<const ClassLabel> golds);

struct CrossValidationOptions {
  std::size_t folds = 5;
  std::size_t repeats = 10;
  /// Repeat r uses seed + r. When false every repeat reuses the base seed.
  bool vary_seed_per_repeat = true;
};

struct EvalReport {
  double accuracy = 0.0;
  double mean_rank = 0.0;
  std::array<double, kNumClasses> per_class_accuracy{};
  /// Held-out predictions scored per repeat; independent of SMOTE.
  std::size_t evaluated_per_repeat = 0;
  /// Samples the classifier saw per (repeat, fold), summed over folds.
  std::size_t trained_per_repeat = 0;
  TrainConfig config;
  CrossValidationOptions options;
};

/// For each repeat and fold: SMOTE on the training split only (when enabled),
/// train, score the held-out fold. Metrics are pooled over a repeat's held-out
/// predictions and averaged over repeats. Training errors are rethrown with the
/// (repeat, fold) attached.
EvalReport cross_validate(std::span<const SignalVector> signals, std::span<const ClassLabel> golds,
                          const TrainConfig& config, const CrossValidationOptions& options = {});

struct AblationRow {
  std::string name;
  EvalReport report;
};

/// Seven rows: the full configuration ("Submission"), "No SMOTE", then one row
/// per feature group with that group's columns zeroed.
std::vector<AblationRow> ablation(std::span<const SignalVector> signals, std::span<const ClassLabel> golds,
                                  const TrainConfig& config, const CrossValidationOptions& options = {});

std::vector<SignalVector> zero_group(std::span<const SignalVector> signals, FeatureGroup group);

/// `left_out_group,mean_accuracy,mean_rank`.
std::string report_to_csv(std::span<const AblationRow> rows);
/// Header `group,<ten class names>`; one row per feature group.
std::string weight_matrix_to_csv(const std::array<std::array<double, kNumClasses>, kNumGroups>& matrix);

}  // namespace finmatcher
