#include <doctest.h>

#include <cmath>
#include <random>

#include "finmatcher/errors.hpp"
#include "finmatcher/smote.hpp"

using namespace finmatcher;

namespace {

std::vector<Sample> make_samples(const std::vector<std::pair<ClassLabel, std::size_t>>& counts, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::vector<Sample> out;
  for (const auto& [label, n] : counts) {
    for (std::size_t i = 0; i < n; ++i) {
      Sample s;
      s.label = label;
      for (auto& x : s.signal) x = value(gen);
      out.push_back(s);
    }
  }
  return out;
}

std::array<std::size_t, kNumClasses> class_counts(const std::vector<Sample>& samples) {
  std::array<std::size_t, kNumClasses> counts{};
  for (const auto& s : samples) ++counts[index_of(s.label)];
  return counts;
}

}  // namespace

TEST_CASE("smote threshold floors") {
  CHECK(smote_threshold(229, 1.0 / 3.0) == 76);
  CHECK(smote_threshold(3, 1.0 / 3.0) == 1);
  CHECK(smote_threshold(300, 1.0 / 3.0) == 100);
  CHECK(smote_threshold(10, 1.0) == 10);
}

TEST_CASE("minority class raised to exactly the threshold") {
  std::mt19937_64 gen(1);
  const auto samples = make_samples({{ClassLabel::EquityIndex, 229}, {ClassLabel::Forward, 9}, {ClassLabel::Bonds, 80}}, gen);
  const auto result = smote_upsample(samples, 1.0 / 3.0, 5, 77);
  const auto counts = class_counts(result.samples);
  CHECK(result.threshold == 76);
  CHECK(counts[index_of(ClassLabel::Forward)] == 76);
  CHECK(counts[index_of(ClassLabel::Bonds)] == 80);
  CHECK(counts[index_of(ClassLabel::EquityIndex)] == 229);
  CHECK(counts[index_of(ClassLabel::Swap)] == 0);
  CHECK(result.origins.size() == 67);
}

TEST_CASE("no-op when every class is at or above threshold") {
  std::mt19937_64 gen(2);
  const auto samples = make_samples({{ClassLabel::Bonds, 30}, {ClassLabel::Swap, 10}}, gen);
  const auto result = smote_upsample(samples, 1.0 / 3.0, 5, 1);
  REQUIRE(result.samples.size() == samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) CHECK(result.samples[i].signal == samples[i].signal);
  CHECK(smote_upsample({}, 1.0 / 3.0, 5, 1).samples.empty());
}

TEST_CASE("single-record class is duplicated") {
  std::mt19937_64 gen(3);
  const auto samples = make_samples({{ClassLabel::Bonds, 12}, {ClassLabel::MMIs, 1}}, gen);
  const auto result = smote_upsample(samples, 1.0 / 3.0, 5, 1);
  CHECK(result.duplicated_classes == std::vector<ClassLabel>{ClassLabel::MMIs});
  CHECK(class_counts(result.samples)[index_of(ClassLabel::MMIs)] == 4);
  for (std::size_t i = result.original_count; i < result.samples.size(); ++i) {
    CHECK(result.samples[i].signal == samples.back().signal);
  }
}

TEST_CASE("neighbours come from the k nearest same-class samples") {
  // 1-D layout along the first coordinate: 0, 1, 2, 10
  std::vector<Sample> samples(4);
  const double xs[] = {0.0, 1.0, 2.0, 10.0};
  for (int i = 0; i < 4; ++i) {
    samples[i].label = ClassLabel::Swap;
    samples[i].signal[0] = xs[i];
  }
  std::mt19937_64 gen(4);
  auto majority = make_samples({{ClassLabel::Bonds, 60}}, gen);
  samples.insert(samples.end(), majority.begin(), majority.end());
  const auto result = smote_upsample(samples, 1.0 / 3.0, 1, 9);
  for (const auto& o : result.origins) {
    const std::size_t nearest[] = {1, 0, 1, 2};  // nearest neighbour of each swap sample (ties -> lower index)
    CHECK(o.neighbor == nearest[o.origin]);
  }
  CHECK_THROWS_AS(smote_upsample(samples, 0.0, 5, 1), ValidationError);
  CHECK_THROWS_AS(smote_upsample(samples, 0.5, 0, 1), ValidationError);
}

TEST_CASE("count law, originals untouched, convexity over random distributions") {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::pair<ClassLabel, std::size_t>> dist;
    for (auto label : kAllClasses) {
      if (gen() % 4) dist.emplace_back(label, 1 + gen() % 60);
    }
    if (dist.empty()) dist.emplace_back(ClassLabel::Bonds, 5);
    const auto samples = make_samples(dist, gen);
    const double fraction = 0.1 + 0.9 * static_cast<double>(gen() % 1000) / 1000.0;
    const int k = 1 + static_cast<int>(gen() % 7);
    const auto result = smote_upsample(samples, fraction, k, gen());

    std::size_t majority = 0;
    for (const auto& [label, n] : dist) majority = std::max(majority, n);
    const auto threshold = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(majority) + 1e-9));
    const auto counts = class_counts(result.samples);
    for (const auto& [label, n] : dist) {
      CHECK(counts[index_of(label)] >= threshold);
      CHECK(counts[index_of(label)] == std::max(n, threshold));
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
      CHECK(result.samples[i].signal == samples[i].signal);
      CHECK(result.samples[i].label == samples[i].label);
    }
    REQUIRE(result.origins.size() == result.samples.size() - samples.size());
    for (std::size_t s = 0; s < result.origins.size(); ++s) {
      const auto& o = result.origins[s];
      const auto& syn = result.samples[samples.size() + s];
      CHECK(samples[o.origin].label == syn.label);
      CHECK(samples[o.neighbor].label == syn.label);
      CHECK((o.u >= 0.0 && o.u <= 1.0));
      double residual = 0.0;
      for (std::size_t j = 0; j < kSignalSize; ++j) {
        const double x = samples[o.origin].signal[j];
        const double n = samples[o.neighbor].signal[j];
        residual = std::max(residual, std::abs(syn.signal[j] - (x + o.u * (n - x))));
      }
      CHECK(residual < 1e-9);
    }
  }
}
