#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <variant>
#include <vector>

#include "selmerlab/core/rng.hpp"
#include "selmerlab/linalg/dense.hpp"
#include "selmerlab/linalg/matrix.hpp"
#include "selmerlab/linalg/padic.hpp"
#include "selmerlab/quadratic/quad_space.hpp"

namespace selmerlab {

/// Verifies that the columns of a 2n x n matrix span a maximal isotropic
/// direct summand: Q vanishes on every column, every pair of columns is
/// orthogonal, and all elementary divisors are units. Pairwise
/// orthogonality is checked separately because isotropic generators need not
/// span an isotropic subgroup when 2 is not a unit.
bool is_lagrangian(const QuadSpace& space, const RingMatrix& basis);

/// A rank-n maximal isotropic direct summand of a hyperbolic space over
/// Z/p^e (e = 1 covers F_p), stored by a 2n x n basis whose columns
/// generate it.
///
/// Alongside the basis a "dual" matrix D mod p is kept with <b_i, d_j> = 1
/// if i = j and 0 otherwise. D stays valid under every precision extension
/// because extensions never change the basis mod p.
class Lagrangian {
 public:
  using WordBasis = Dense<std::uint64_t>;
  using BigBasis = Dense<mpz_class>;

  /// Validates with is_lagrangian; throws Error otherwise.
  Lagrangian(QuadSpace space, const RingMatrix& basis);

  const QuadSpace& space() const { return space_; }
  unsigned precision() const { return space_.ring().exponent(); }
  std::uint64_t prime() const { return space_.ring().prime(); }

  RingMatrix basis() const;
  /// Basis normalised to the identity on the first n rows that are
  /// independent mod p. Two Lagrangians are equal iff these agree.
  RingMatrix canonical_basis() const;

  /// Raises the precision to `new_e`, drawing each new p-adic digit
  /// uniformly among the lifts that keep the subgroup a Lagrangian. The
  /// reduction mod the old p^e is unchanged.
  void extend(unsigned new_e, Rng& rng);

  const std::variant<WordBasis, BigBasis>& raw_basis() const { return basis_; }
  const Dense<std::uint64_t>& dual_mod_p() const { return dual_; }

  friend bool operator==(const Lagrangian& a, const Lagrangian& b);

 private:
  Lagrangian() : space_(RingTag::prime_field(2), 1) {}
  friend Lagrangian sample_lagrangian(const QuadSpace& space, Rng& rng);

  QuadSpace space_;
  std::variant<WordBasis, BigBasis> basis_;
  Dense<std::uint64_t> dual_;
};

/// Uniform random Lagrangian of a space over F_p or Z/p^e.
///
/// Over F_p an isotropic basis is built one vector at a time inside a
/// shrinking hyperbolic frame, each vector uniform among the admissible
/// ones. Higher precision is reached by uniform digit-by-digit lifting.
Lagrangian sample_lagrangian(const QuadSpace& space, Rng& rng);

inline constexpr std::uint64_t kDefaultEnumerationBudget = std::uint64_t{1} << 17;

/// Every Lagrangian of a small space, found by brute-force search over
/// column vectors and deduplicated by canonical basis. Throws
/// BudgetExceeded when p^(2ne) exceeds `budget`.
std::vector<Lagrangian> enumerate_lagrangians(const QuadSpace& space,
                                              std::uint64_t budget = kDefaultEnumerationBudget);

/// Data of the map Z -> V -> V/W.
///
/// V/W is identified with Hom(W, R) through the pairing (W is its own
/// orthogonal complement), so phi has entries phi_ij = <w_i, z_j>. Its kernel
/// mod p^k is Z ∩ W mod p^k.
struct IntersectionProfile {
  RingMatrix phi;
  /// Elementary-divisor valuations of phi, capped at e.
  std::vector<unsigned> valuations;
  PadicRankReport corank;
};

IntersectionProfile intersection_profile(const Lagrangian& z, const Lagrangian& w,
                                         unsigned margin = kDefaultPrecisionMargin);

/// Capped valuations only, without materialising phi as a RingMatrix.
std::vector<unsigned> intersection_valuations(const Lagrangian& z, const Lagrangian& w);

}  // namespace selmerlab
