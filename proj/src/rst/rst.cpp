#include "selmerlab/rst/rst.hpp"

#include "selmerlab/core/error.hpp"

namespace selmerlab {

RSTOutcome rst_from_report(std::uint64_t p, std::size_t n, const PadicRankReport& report) {
  RSTOutcome out;
  out.p = p;
  out.n = n;
  out.corank = report.rank_zero_divisors;
  out.t_invariants = AbelianInvariants::from_p_valuations(p, report.valuations);
  out.precision_used = report.precision_used;
  return out;
}

RSTOutcome sample_rst(std::uint64_t p, std::size_t n, Rng& rng, const PrecisionPolicy& policy) {
  policy.validate();
  unsigned e = policy.e_init;
  const QuadSpace space(RingTag::mod_prime_power(p, e), n);
  Lagrangian z = sample_lagrangian(space, rng);
  Lagrangian w = sample_lagrangian(space, rng);
  unsigned resamples = 0;
  for (;;) {
    const auto report = padic_report(intersection_valuations(z, w), n, e, policy.margin);
    if (!needs_escalation(report)) {
      RSTOutcome out = rst_from_report(p, n, report);
      out.resamples = resamples;
      return out;
    }
    if (2 * e > policy.e_max) {
      throw PrecisionCeiling("intersection still unresolved at precision " + std::to_string(e));
    }
    e *= 2;
    z.extend(e, rng);
    w.extend(e, rng);
    ++resamples;
  }
}

AbelianInvariants sample_t_conditioned(std::uint64_t p, std::size_t n, unsigned r, Rng& rng,
                                       const PrecisionPolicy& policy, std::uint64_t budget) {
  if (r > n) throw Error("corank cannot exceed n");
  for (std::uint64_t attempt = 0; attempt < budget; ++attempt) {
    try {
      RSTOutcome out = sample_rst(p, n, rng, policy);
      if (out.corank == r) return out.t_invariants;
    } catch (const PrecisionCeiling&) {
    }
  }
  throw RejectionBudgetExceeded("no draw with corank " + std::to_string(r) + " in " + std::to_string(budget) +
                                " attempts");
}

double CorankHistogram::frequency(unsigned r) const { return interval(r).estimate; }

Proportion CorankHistogram::interval(unsigned r) const {
  const auto it = counts.find(r);
  return wilson_interval(it == counts.end() ? 0 : it->second, samples);
}

CorankHistogram corank_distribution(std::uint64_t p, std::size_t n, std::uint64_t samples, Rng& rng,
                                    const PrecisionPolicy& policy) {
  if (samples < 1) throw Error("corank_distribution needs at least one sample");
  CorankHistogram h;
  for (std::uint64_t i = 0; i < samples; ++i) {
    try {
      ++h.counts[sample_rst(p, n, rng, policy).corank];
      ++h.samples;
    } catch (const PrecisionCeiling&) {
      ++h.ceiling_events;
    }
  }
  return h;
}

}  // namespace selmerlab
