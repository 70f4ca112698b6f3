#pragma once

#include <cstddef>
#include <cstdint>

#include "selmerlab/core/rng.hpp"
#include "selmerlab/core/stats.hpp"
#include "selmerlab/linalg/padic.hpp"
#include "selmerlab/linalg/smith.hpp"

namespace selmerlab {

/// An alternating matrix (A^T = -A, zero diagonal) over Z with entries
/// bounded by X, or over Z/p^e as a truncation of a Z_p matrix.
class AltMatrix {
 public:
  /// Validates that `entries` is alternating and, over Z, that every entry
  /// has absolute value at most `bound`. `bound` is ignored for Z/p^e.
  AltMatrix(RingMatrix entries, std::uint64_t bound = 0);

  std::size_t n() const { return entries_.rows(); }
  const RingTag& ring() const { return entries_.ring(); }
  const RingMatrix& entries() const { return entries_; }
  std::uint64_t bound() const { return bound_; }

  /// Appends uniform p-adic digits above the diagonal up to precision
  /// new_e, keeping the residue mod the old p^e.
  void extend(unsigned new_e, Rng& rng);

 private:
  RingMatrix entries_;
  std::uint64_t bound_;
};

/// pseudo_rank = Z- (or Z_p-) rank of ker A, pseudo_sha = (coker A)_tors.
struct AltSample {
  AltMatrix matrix;
  unsigned pseudo_rank = 0;
  AbelianInvariants pseudo_sha;
  /// Precision doublings, for the p-adic variant.
  unsigned resamples = 0;
};

/// Entries above the diagonal i.i.d. uniform on [-X, X].
AltMatrix sample_alt_bounded(std::size_t n, std::uint64_t bound, Rng& rng);

/// Entries above the diagonal i.i.d. uniform mod p^e.
AltMatrix sample_alt_padic(std::size_t n, std::uint64_t p, unsigned e, Rng& rng);

/// Over Z: exact rank and cokernel torsion. Over Z/p^e: the p-adic kernel
/// rank and sum of Z/p^v over finite v; throws UnstablePrecision when
/// needs_escalation says the truncation is not conclusive.
AltSample analyze(const AltMatrix& a, unsigned margin = kDefaultPrecisionMargin);

/// sample_alt_padic followed by analyze, doubling the precision of the
/// same matrix while unstable. Throws PrecisionCeiling past policy.e_max.
AltSample sample_alt_padic_stable(std::size_t n, std::uint64_t p, Rng& rng, const PrecisionPolicy& policy = {});

struct RankProbability {
  double estimate = 0;
  Proportion interval;
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
  /// Value fixed by parity or range; no sampling was done.
  bool exact = false;
};

/// Monte Carlo Prob(rk ker A >= r) for A uniform with entries in [-X, X].
/// rk ker A has the parity of n, so when n - r is odd the event equals
/// rk ker A >= r + 1. Returns exact 1 when r <= n mod 2 and exact 0 when
/// the event is empty.
RankProbability prob_rank_ge(std::size_t n, std::uint64_t bound, unsigned r, std::uint64_t samples, Rng& rng);

/// Exact Prob(rk ker A >= r) as (hits, total) by enumerating all
/// (2X+1)^(n(n-1)/2) matrices. Throws BudgetExceeded past `budget`.
std::pair<std::uint64_t, std::uint64_t> exact_prob_rank_ge(std::size_t n, std::uint64_t bound, unsigned r,
                                                           std::uint64_t budget = 50'000'000);

struct CokerHistogram {
  Histogram<AbelianInvariants> counts;
  /// Draws rejected for the wrong pseudo-rank or a precision ceiling.
  std::uint64_t rejected = 0;
};

/// Histogram of pseudo_sha over p-adic alternating matrices conditioned on
/// pseudo_rank = r. Requires n = r mod 2. Each accepted sample may use at
/// most `budget` draws.
CokerHistogram conditioned_coker(std::size_t n, std::uint64_t p, unsigned r, std::uint64_t samples, Rng& rng,
                                 const PrecisionPolicy& policy = {},
                                 std::uint64_t budget = 1'000'000);

/// Pfaffian of an even alternating integer matrix by expansion along the
/// first row.
mpz_class pfaffian(const RingMatrix& a);

}  // namespace selmerlab
