#pragma once

#include <cstdint>
#include <cmath>
#include <map>
#include <span>

namespace selmerlab {

inline constexpr double kZ95 = 1.959963984540054;

/// A binomial proportion with its Wilson score interval.
struct Proportion {
  double estimate = 0;
  double lo = 0;
  double hi = 0;
};

Proportion wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kZ95);

struct MeanEstimate {
  double mean = 0;
  double se = 0;
};

MeanEstimate sample_mean(std::span<const double> xs);

/// Median of k block means (blocks of equal size, remainder dropped).
/// se is the spread of the block means scaled as for a mean of k values.
MeanEstimate median_of_means(std::span<const double> xs, std::size_t blocks);

template <class K>
using Histogram = std::map<K, std::uint64_t>;

template <class K>
std::uint64_t histogram_total(const Histogram<K>& h) {
  std::uint64_t total = 0;
  for (const auto& [k, c] : h) total += c;
  return total;
}

/// Half the L1 distance between two normalised histograms.
template <class K>
double total_variation(const Histogram<K>& a, const Histogram<K>& b) {
  const double ta = static_cast<double>(histogram_total(a));
  const double tb = static_cast<double>(histogram_total(b));
  double sum = 0;
  for (const auto& [k, c] : a) {
    const auto it = b.find(k);
    const double pb = it == b.end() ? 0 : static_cast<double>(it->second) / tb;
    sum += std::abs(static_cast<double>(c) / ta - pb);
  }
  for (const auto& [k, c] : b)
    if (!a.count(k)) sum += static_cast<double>(c) / tb;
  return sum / 2;
}

/// Total variation against a reference distribution given as probabilities.
template <class K>
double total_variation(const Histogram<K>& a, const std::map<K, double>& ref) {
  const double ta = static_cast<double>(histogram_total(a));
  double sum = 0;
  for (const auto& [k, c] : a) {
    const auto it = ref.find(k);
    sum += std::abs(static_cast<double>(c) / ta - (it == ref.end() ? 0 : it->second));
  }
  for (const auto& [k, q] : ref)
    if (!a.count(k)) sum += q;
  return sum / 2;
}

}  // namespace selmerlab
