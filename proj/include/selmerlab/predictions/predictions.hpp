#pragma once

#include <gmpxx.h>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cstdint>
#include <vector>

namespace selmerlab {

/// 50 significant decimal digits.
using Decimal = boost::multiprecision::cpp_dec_float_50;

/// Prob(dim Sel_p = s) = prod_{j>=0} (1 + p^-j)^-1 * prod_{j=1..s} p / (p^j - 1).
/// The infinite product stops once p^-j < 10^-45.
Decimal sel_p_density(std::uint64_t p, unsigned s);

struct DensityTable {
  std::uint64_t p = 0;
  /// entries[s] = sel_p_density(p, s)
  std::vector<Decimal> entries;
};

/// Densities for s = 0..s_max.
DensityTable density_table(std::uint64_t p, unsigned s_max);

/// Sum of the positive divisors of m.
mpz_class sigma(std::uint64_t m);

/// Number of Lagrangians of the hyperbolic space of rank 2n over F_p,
/// prod_{i<n} (p^i + 1).
mpz_class lagrangian_count(std::size_t n, std::uint64_t p);

/// Same over Z/p^e: each Lagrangian mod p has p^((e-1) n(n-1)/2) lifts.
mpz_class lagrangian_count(std::size_t n, std::uint64_t p, unsigned e);

/// zeta(k) for k >= 2 from the partial sum to 1000 with an Euler-Maclaurin
/// tail.
Decimal zeta(unsigned k);

/// 2^(4/3) 3^(-3/2) / zeta(10).
Decimal census_constant();

/// sum_s p^s sel_p_density(p, s), stopped once a term drops below 10^-12.
Decimal mean_selmer_check(std::uint64_t p);

/// Mean of #(Z ∩ W) for independent uniform Lagrangians of F_p^{2n}:
/// 1 + (p^n - 1) / (p^(n-1) + 1).
Decimal mean_intersection_finite(std::uint64_t p, std::size_t n);

}  // namespace selmerlab
