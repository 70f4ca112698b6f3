#pragma once

#include <cstddef>
#include <cstdint>

#include "selmerlab/core/rng.hpp"
#include "selmerlab/core/stats.hpp"
#include "selmerlab/linalg/padic.hpp"
#include "selmerlab/linalg/smith.hpp"
#include "selmerlab/quadratic/lagrangian.hpp"

namespace selmerlab {

/// Exact-sequence data 0 -> R -> S -> T -> 0 for one pair of random
/// Lagrangians of Z_p^{2n}: the corank r of R and the finite group T.
struct RSTOutcome {
  std::uint64_t p = 0;
  std::size_t n = 0;
  unsigned corank = 0;
  AbelianInvariants t_invariants;
  unsigned precision_used = 0;
  /// Number of precision doublings needed.
  unsigned resamples = 0;
};

/// Reads r and T off an intersection report: r counts divisors that are
/// zero at working precision, T is the sum of Z/p^v over finite v.
RSTOutcome rst_from_report(std::uint64_t p, std::size_t n, const PadicRankReport& report);

/// Samples Z and W at precision policy.e_init and doubles the precision of
/// the same pair (by extending both lifts) until needs_escalation is false.
/// Throws PrecisionCeiling when that would pass policy.e_max.
RSTOutcome sample_rst(std::uint64_t p, std::size_t n, Rng& rng, const PrecisionPolicy& policy = {});

inline constexpr std::uint64_t kDefaultRejectionBudget = 1'000'000;

/// T from a sample_rst draw conditioned on corank r, by rejection. Draws
/// that hit the precision ceiling count against the budget.
AbelianInvariants sample_t_conditioned(std::uint64_t p, std::size_t n, unsigned r, Rng& rng,
                                       const PrecisionPolicy& policy = {},
                                       std::uint64_t budget = kDefaultRejectionBudget);

struct CorankHistogram {
  Histogram<unsigned> counts;
  /// Draws that completed (ceiling events excluded).
  std::uint64_t samples = 0;
  std::uint64_t ceiling_events = 0;

  double frequency(unsigned r) const;
  Proportion interval(unsigned r) const;
};

/// `samples` draws of sample_rst tallied by corank.
CorankHistogram corank_distribution(std::uint64_t p, std::size_t n, std::uint64_t samples, Rng& rng,
                                    const PrecisionPolicy& policy = {});

}  // namespace selmerlab
