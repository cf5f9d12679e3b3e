#include "finmatcher/smote.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "finmatcher/errors.hpp"
#include "finmatcher/random.hpp"

namespace finmatcher {
namespace {

double squared_distance(const SignalVector& a, const SignalVector& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

}  // namespace

std::size_t smote_threshold(std::size_t majority_count, double fraction) {
  // The epsilon keeps exact products such as 300 * (1/3) from flooring to 99.
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(majority_count) + 1e-9));
}

SmoteResult smote_upsample(std::span<const Sample> samples, double fraction, int k, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ValidationError("smote fraction must be in (0, 1]");
  if (k < 1) throw ValidationError("smote k must be >= 1");

  SmoteResult result;
  result.samples.assign(samples.begin(), samples.end());
  result.original_count = samples.size();

  std::array<std::vector<std::size_t>, kNumClasses> members;
  for (std::size_t i = 0; i < samples.size(); ++i) members[index_of(samples[i].label)].push_back(i);
  std::size_t majority = 0;
  for (const auto& m : members) majority = std::max(majority, m.size());
  if (majority == 0) return result;
  result.threshold = smote_threshold(majority, fraction);

  Rng rng(seed);
  for (auto label : kAllClasses) {
    const auto& idx = members[index_of(label)];
    if (idx.empty() || idx.size() >= result.threshold) continue;
    const auto needed = result.threshold - idx.size();

    if (idx.size() == 1) {
      result.duplicated_classes.push_back(label);
      for (std::size_t n = 0; n < needed; ++n) {
        result.samples.push_back(samples[idx[0]]);
        result.origins.push_back({idx[0], idx[0], 0.0});
      }
      continue;
    }

    // k nearest same-class neighbours of every member; ties by input order
    const auto neighbours_per = std::min<std::size_t>(static_cast<std::size_t>(k), idx.size() - 1);
    std::vector<std::vector<std::size_t>> neighbours(idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a) {
      std::vector<std::pair<double, std::size_t>> dist;
      dist.reserve(idx.size() - 1);
      for (std::size_t b = 0; b < idx.size(); ++b) {
        if (a != b) dist.emplace_back(squared_distance(samples[idx[a]].signal, samples[idx[b]].signal), idx[b]);
      }
      std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(neighbours_per), dist.end());
      for (std::size_t n = 0; n < neighbours_per; ++n) neighbours[a].push_back(dist[n].second);
    }

    for (std::size_t n = 0; n < needed; ++n) {
      const auto a = static_cast<std::size_t>(rng.below(idx.size()));
      const auto neighbour = neighbours[a][static_cast<std::size_t>(rng.below(neighbours_per))];
      const double u = rng.unit_closed();
      const auto& x = samples[idx[a]].signal;
      const auto& nb = samples[neighbour].signal;
      Sample synthetic{{}, label};
      for (std::size_t j = 0; j < kSignalSize; ++j) synthetic.signal[j] = x[j] + u * (nb[j] - x[j]);
      result.samples.push_back(synthetic);
      result.origins.push_back({idx[a], neighbour, u});
    }
  }
  return result;
}

}  // namespace finmatcher
