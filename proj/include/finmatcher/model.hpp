#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "finmatcher/dataset.hpp"
#include "finmatcher/features.hpp"

namespace finmatcher {

struct TrainConfig {
  int epochs = 100;
  int batch_size = 25;
  double learning_rate = 0.05;
  std::uint64_t seed = 42;
  bool smote_enabled = true;
  double smote_fraction = 1.0 / 3.0;
  int smote_k = 5;

  /// ValidationError on out-of-range fields.
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

struct Sample {
  SignalVector signal{};
  ClassLabel label = ClassLabel::EquityIndex;
};

using ScoreVector = std::array<double, kNumClasses>;

/// Single affine layer 50 -> 10 followed by an element-wise sigmoid.
struct DenseModel {
  std::array<std::array<double, kSignalSize>, kNumClasses> weights{};
  std::array<double, kNumClasses> bias{};

  static constexpr std::string_view activation = "sigmoid";

  /// Weights uniform in [-0.1, 0.1], bias zero.
  static DenseModel initialize(std::uint64_t seed);

  bool operator==(const DenseModel&) const = default;
};

ScoreVector forward(const DenseModel& model, const SignalVector& signal);

struct Gradient {
  std::array<std::array<double, kSignalSize>, kNumClasses> weights{};
  std::array<double, kNumClasses> bias{};
};

/// Mean over the batch and the ten outputs of the squared error against the
/// one-hot target.
double mse_loss(const DenseModel& model, std::span<const Sample> batch);
Gradient mse_gradient(const DenseModel& model, std::span<const Sample> batch);

struct TrainResult {
  DenseModel model;
  /// Loss over the whole training set after the final epoch.
  double final_loss = 0.0;
};

/// Mini-batch gradient descent; order shuffled each epoch; the last partial
/// batch is kept. Same data, config and seed give bit-identical parameters.
/// ValidationError on an empty set, TrainingError on a non-finite loss.
TrainResult train(std::span<const Sample> samples, const TrainConfig& config);

struct RankedEntry {
  ClassLabel label;
  double score;
};

/// All ten classes by descending score, lower class index first on ties.
using RankedPrediction = std::array<RankedEntry, kNumClasses>;

RankedPrediction rank_scores(const ScoreVector& scores);
RankedPrediction predict_ranked(const DenseModel& model, const SignalVector& signal);

/// Summed absolute input weight per feature group.
std::array<double, kNumGroups> group_weight_sums(const DenseModel& model);
/// Entry [g][c] sums |W[c][col]| over the columns of group g.
std::array<std::array<double, kNumClasses>, kNumGroups> group_class_weight_matrix(const DenseModel& model);

/// Versioned JSON with weights, bias, activation and the training config.
std::string model_to_json(const DenseModel& model, const TrainConfig& config);
struct ModelFile {
  DenseModel model;
  TrainConfig config;
};
ModelFile model_from_json(std::string_view text, const std::string& source = "<model>");

}  // namespace finmatcher
