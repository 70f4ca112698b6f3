#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <vector>

#include "selmerlab/linalg/matrix.hpp"

namespace selmerlab {

/// U * M * V = diag(divisors), with U, V unimodular over Z.
struct SmithDecomposition {
  RingMatrix U;
  RingMatrix V;
  /// min(rows, cols) nonnegative divisors; zeros form a trailing block.
  std::vector<mpz_class> divisors;
};

/// Isomorphism type of a finite abelian group, as its invariant factors
/// d_1 | d_2 | ... with every d_i > 1. The empty list is the trivial group.
class AbelianInvariants {
 public:
  AbelianInvariants() = default;
  explicit AbelianInvariants(std::vector<mpz_class> factors);

  /// Invariant factors of the p-group (Z/p^v_1) + (Z/p^v_2) + ...; zero
  /// exponents are dropped.
  static AbelianInvariants from_p_valuations(std::uint64_t p, const std::vector<unsigned>& valuations);

  const std::vector<mpz_class>& factors() const { return factors_; }
  bool trivial() const { return factors_.empty(); }
  mpz_class order() const;

  bool has_square_order() const;
  /// Factors occur in equal adjacent pairs (A + A for some A).
  bool factors_paired() const;

  /// "[2,2,4,4]"; "[]" for the trivial group.
  std::string to_string() const;

  friend bool operator==(const AbelianInvariants&, const AbelianInvariants&) = default;
  friend bool operator<(const AbelianInvariants& a, const AbelianInvariants& b);

 private:
  std::vector<mpz_class> factors_;
};

struct CokernelInfo {
  std::size_t free_rank = 0;
  AbelianInvariants torsion;
};

/// Smith normal form over Z with minimal-|entry| pivoting.
SmithDecomposition smith_normal_form(const RingMatrix& m);

/// Elementary divisors only (no transforms). Same conventions as above.
std::vector<mpz_class> smith_divisors(const RingMatrix& m);

/// Z^rows / M Z^cols split as free rank plus torsion invariants.
CokernelInfo coker_torsion(const RingMatrix& m);

/// Rank over Q by fraction-free elimination. Word-sized arithmetic is used
/// while every intermediate fits; any overflow restarts the elimination with
/// GMP integers.
std::size_t rational_rank(const RingMatrix& m);

/// cols(M) - rank_Q(M).
std::size_t rational_kernel_rank(const RingMatrix& m);

/// True when n is a perfect square (n >= 0).
bool is_perfect_square(const mpz_class& n);

}  // namespace selmerlab
