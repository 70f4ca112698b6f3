#include "selmerlab/core/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "selmerlab/core/error.hpp"

namespace selmerlab {

Proportion wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) return {0, 0, 1};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  return {p, std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

MeanEstimate sample_mean(std::span<const double> xs) {
  if (xs.empty()) return {};
  double sum = 0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0};
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double var = ss / static_cast<double>(xs.size() - 1);
  return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

MeanEstimate median_of_means(std::span<const double> xs, std::size_t blocks) {
  if (blocks == 0) throw Error("median_of_means needs at least one block");
  const std::size_t size = xs.size() / blocks;
  if (size == 0) return sample_mean(xs);
  std::vector<double> means;
  for (std::size_t b = 0; b < blocks; ++b) means.push_back(sample_mean(xs.subspan(b * size, size)).mean);
  const MeanEstimate spread = sample_mean(means);
  std::sort(means.begin(), means.end());
  const double median = blocks % 2 ? means[blocks / 2] : (means[blocks / 2 - 1] + means[blocks / 2]) / 2;
  return {median, spread.se};
}

}  // namespace selmerlab
