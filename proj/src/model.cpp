#include "finmatcher/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "finmatcher/errors.hpp"
#include "finmatcher/random.hpp"

namespace finmatcher {
namespace {

constexpr int kModelFormatVersion = 1;

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double one_hot(const Sample& sample, std::size_t k) { return index_of(sample.label) == k ? 1.0 : 0.0; }

// Loss over `batch` and, when `grad` is set, its gradient (overwritten).
double loss_and_gradient(const DenseModel& model, std::span<const Sample> batch, Gradient* grad) {
  if (grad) *grad = Gradient{};
  if (batch.empty()) return 0.0;
  const double scale = 1.0 / (static_cast<double>(batch.size()) * static_cast<double>(kNumClasses));
  double loss = 0.0;
  for (const auto& sample : batch) {
    const auto y = forward(model, sample.signal);
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      const double err = y[k] - one_hot(sample, k);
      loss += err * err;
      if (grad) {
        const double dz = 2.0 * err * y[k] * (1.0 - y[k]) * scale;
        grad->bias[k] += dz;
        auto& row = grad->weights[k];
        for (std::size_t j = 0; j < kSignalSize; ++j) row[j] += dz * sample.signal[j];
      }
    }
  }
  return loss * scale;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 0) throw ValidationError("epochs must be >= 0");
  if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ValidationError("learning_rate must be positive");
  if (!(smote_fraction > 0.0 && smote_fraction <= 1.0)) throw ValidationError("smote_fraction must be in (0, 1]");
  if (smote_k < 1) throw ValidationError("smote_k must be >= 1");
}

DenseModel DenseModel::initialize(std::uint64_t seed) {
  DenseModel model;
  Rng rng(seed);
  for (auto& row : model.weights) {
    for (auto& w : row) w = rng.uniform(-0.1, 0.1);
  }
  return model;
}

ScoreVector forward(const DenseModel& model, const SignalVector& signal) {
  ScoreVector out{};
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const auto& row = model.weights[k];
    const double z = std::inner_product(row.begin(), row.end(), signal.begin(), model.bias[k]);
    out[k] = sigmoid(z);
  }
  return out;
}

double mse_loss(const DenseModel& model, std::span<const Sample> batch) {
  return loss_and_gradient(model, batch, nullptr);
}

Gradient mse_gradient(const DenseModel& model, std::span<const Sample> batch) {
  Gradient grad;
  loss_and_gradient(model, batch, &grad);
  return grad;
}

TrainResult train(std::span<const Sample> samples, const TrainConfig& config) {
  config.validate();
  if (samples.empty()) throw ValidationError("cannot train on an empty set");
  TrainResult result{DenseModel::initialize(config.seed), 0.0};
  auto& model = result.model;

  Rng rng(derive_seed(config.seed, 1));
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Sample> batch;
  batch.reserve(static_cast<std::size_t>(config.batch_size));
  Gradient grad;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    int batch_no = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size), ++batch_no) {
      const auto end = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      batch.clear();
      for (auto i = start; i < end; ++i) batch.push_back(samples[order[i]]);
      const double loss = loss_and_gradient(model, batch, &grad);
      if (!std::isfinite(loss)) throw TrainingError("non-finite training loss", epoch, batch_no);
      for (std::size_t k = 0; k < kNumClasses; ++k) {
        model.bias[k] -= config.learning_rate * grad.bias[k];
        for (std::size_t j = 0; j < kSignalSize; ++j) model.weights[k][j] -= config.learning_rate * grad.weights[k][j];
      }
    }
  }
  result.final_loss = mse_loss(model, samples);
  if (!std::isfinite(result.final_loss)) throw TrainingError("non-finite final loss", config.epochs, 0);
  return result;
}

RankedPrediction rank_scores(const ScoreVector& scores) {
  RankedPrediction ranked{};
  for (std::size_t k = 0; k < kNumClasses; ++k) ranked[k] = {class_from_index(k), scores[k]};
  std::stable_sort(ranked.begin(), ranked.end(), [](const RankedEntry& a, const RankedEntry& b) {
    return a.score > b.score;
  });
  return ranked;
}

RankedPrediction predict_ranked(const DenseModel& model, const SignalVector& signal) {
  return rank_scores(forward(model, signal));
}

std::array<double, kNumGroups> group_weight_sums(const DenseModel& model) {
  std::array<double, kNumGroups> out{};
  const auto matrix = group_class_weight_matrix(model);
  for (std::size_t g = 0; g < kNumGroups; ++g) {
    // accumulate in the same column order as the matrix so the two agree exactly
    double sum = 0.0;
    for (std::size_t c = 0; c < kNumClasses; ++c) sum += matrix[g][c];
    out[g] = sum;
  }
  return out;
}

std::array<std::array<double, kNumClasses>, kNumGroups> group_class_weight_matrix(const DenseModel& model) {
  std::array<std::array<double, kNumClasses>, kNumGroups> out{};
  for (std::size_t g = 0; g < kNumGroups; ++g) {
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      double sum = 0.0;
      for (std::size_t j = g * kNumClasses; j < (g + 1) * kNumClasses; ++j) sum += std::abs(model.weights[c][j]);
      out[g][c] = sum;
    }
  }
  return out;
}

std::string model_to_json(const DenseModel& model, const TrainConfig& config) {
  nlohmann::json doc;
  doc["format"] = "finmatcher-dense-model";
  doc["version"] = kModelFormatVersion;
  doc["activation"] = DenseModel::activation;
  doc["weights"] = model.weights;
  doc["bias"] = model.bias;
  doc["config"] = {
      {"epochs", config.epochs},
      {"batch_size", config.batch_size},
      {"learning_rate", config.learning_rate},
      {"seed", config.seed},
      {"smote_enabled", config.smote_enabled},
      {"smote_fraction", config.smote_fraction},
      {"smote_k", config.smote_k},
  };
  return doc.dump(1) + "\n";
}

ModelFile model_from_json(std::string_view text, const std::string& source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source, 0, std::string("invalid model JSON: ") + e.what());
  }
  try {
    if (doc.at("version").get<int>() != kModelFormatVersion) {
      throw ValidationError(source + ": unsupported model version " + doc.at("version").dump());
    }
    if (doc.at("activation").get<std::string>() != DenseModel::activation) {
      throw ValidationError(source + ": unsupported activation " + doc.at("activation").dump());
    }
    ModelFile file;
    const auto& weights = doc.at("weights");
    if (!weights.is_array() || weights.size() != kNumClasses) throw ValidationError(source + ": weights must be 10x50");
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      if (!weights[k].is_array() || weights[k].size() != kSignalSize) {
        throw ValidationError(source + ": weights must be 10x50");
      }
      for (std::size_t j = 0; j < kSignalSize; ++j) file.model.weights[k][j] = weights[k][j].get<double>();
    }
    const auto& bias = doc.at("bias");
    if (!bias.is_array() || bias.size() != kNumClasses) throw ValidationError(source + ": bias must have 10 entries");
    for (std::size_t k = 0; k < kNumClasses; ++k) file.model.bias[k] = bias[k].get<double>();
    const auto& cfg = doc.at("config");
    file.config.epochs = cfg.at("epochs").get<int>();
    file.config.batch_size = cfg.at("batch_size").get<int>();
    file.config.learning_rate = cfg.at("learning_rate").get<double>();
    file.config.seed = cfg.at("seed").get<std::uint64_t>();
    file.config.smote_enabled = cfg.at("smote_enabled").get<bool>();
    file.config.smote_fraction = cfg.at("smote_fraction").get<double>();
    file.config.smote_k = cfg.at("smote_k").get<int>();
    return file;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(source + ": malformed model file: " + e.what());
  }
}

}  // namespace finmatcher
