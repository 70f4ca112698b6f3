#pragma once

#include <cstdint>

namespace selmerlab::detail {

/// Random integer matrices whose SNF transforms fail to reconstruct the
/// diagonal, are not unimodular, or whose divisors do not chain.
std::uint64_t snf_failures(std::uint64_t samples, std::uint64_t seed, unsigned jobs);

/// Random 3 x 3 matrices with entries in [-3, 3] where coker_torsion
/// disagrees with determinantal divisors or with a brute-force count of
/// the cokernel mod p^j.
std::uint64_t coker_failures(std::uint64_t samples, std::uint64_t seed, unsigned jobs);

struct ChiSquare {
  std::size_t bins = 0;
  double statistic = 0;
  double critical = 0;
};

/// Pearson statistic of `draws` sampler outputs against the uniform law on
/// the enumerated Lagrangians of (Z/p^e)^{2n}.
ChiSquare lagrangian_chi_square(std::uint64_t p, std::size_t n, unsigned e, std::uint64_t draws, double alpha,
                                std::uint64_t seed, unsigned jobs);

}  // namespace selmerlab::detail
