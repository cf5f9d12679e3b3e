#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "finmatcher/model.hpp"

namespace finmatcher {

/// floor(fraction * majority_count).
std::size_t smote_threshold(std::size_t majority_count, double fraction);

/// How a synthetic sample was made: origin + u * (neighbor - origin).
/// Indices refer to the input sample list.
struct SyntheticOrigin {
  std::size_t origin = 0;
  std::size_t neighbor = 0;
  double u = 0.0;
};

struct SmoteResult {
  /// The input samples unchanged and in order, followed by the synthetic ones.
  std::vector<Sample> samples;
  /// One entry per synthetic sample, aligned with samples[original_count + i].
  std::vector<SyntheticOrigin> origins;
  std::size_t original_count = 0;
  std::size_t threshold = 0;
  /// Classes with a single sample, upsampled by duplication.
  std::vector<ClassLabel> duplicated_classes;
};

/// Raises every present class below the threshold to exactly the threshold.
/// Neighbors are the `k` nearest same-class samples by Euclidean distance.
/// Classes with no samples are left empty.
SmoteResult smote_upsample(std::span<const Sample> samples, double fraction, int k, std::uint64_t seed);

}  // namespace finmatcher
