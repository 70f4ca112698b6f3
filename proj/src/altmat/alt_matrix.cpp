#include "selmerlab/altmat/alt_matrix.hpp"

#include <vector>

#include "selmerlab/core/error.hpp"

namespace selmerlab {

AltMatrix::AltMatrix(RingMatrix entries, std::uint64_t bound) : entries_(std::move(entries)), bound_(bound) {
  if (entries_.rows() != entries_.cols()) throw DimensionMismatch("alternating matrices are square");
  if (!entries_.is_alternating()) throw Error("matrix is not alternating");
  if (ring().is_integers()) {
    const mpz_class b(static_cast<unsigned long>(bound));
    for (const auto& x : entries_.entries().data())
      if (abs(x) > b) throw Error("entry exceeds the bound " + std::to_string(bound));
  } else {
    bound_ = 0;
  }
}

void AltMatrix::extend(unsigned new_e, Rng& rng) {
  if (!ring().is_modular()) throw Error("only p-adic alternating matrices can be extended");
  const unsigned e = ring().exponent();
  if (new_e < e) throw Error("extend cannot lower the precision");
  if (new_e == e) return;
  const std::uint64_t p = ring().prime();
  Dense<mpz_class> d = entries_.entries();
  mpz_class pk;
  for (unsigned k = e; k < new_e; ++k) {
    mpz_ui_pow_ui(pk.get_mpz_t(), p, k);
    for (std::size_t i = 0; i < n(); ++i)
      for (std::size_t j = i + 1; j < n(); ++j) d(i, j) += pk * static_cast<unsigned long>(rng.below(p));
  }
  for (std::size_t i = 0; i < n(); ++i)
    for (std::size_t j = i + 1; j < n(); ++j) d(j, i) = -d(i, j);
  entries_ = RingMatrix::from_dense(RingTag::mod_prime_power(p, new_e), std::move(d));
}

AltMatrix sample_alt_bounded(std::size_t n, std::uint64_t bound, Rng& rng) {
  if (n < 1) throw Error("matrix size must be at least 1");
  if (bound < 1) throw Error("entry bound must be at least 1");
  const auto x = static_cast<std::int64_t>(bound);
  Dense<mpz_class> d(n, n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::int64_t v = rng.between(-x, x);
      d(i, j) = static_cast<long>(v);
      d(j, i) = static_cast<long>(-v);
    }
  return AltMatrix(RingMatrix::from_dense(RingTag::integers(), std::move(d)), bound);
}

AltMatrix sample_alt_padic(std::size_t n, std::uint64_t p, unsigned e, Rng& rng) {
  if (n < 1) throw Error("matrix size must be at least 1");
  const RingTag tag = RingTag::mod_prime_power(p, e);
  Dense<mpz_class> d(n, n, 0);
  const BigModRing big(p, e);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (tag.fits_word()) {
        d(i, j) = static_cast<unsigned long>(rng.below(tag.modulus().get_ui()));
      } else {
        d(i, j) = big.uniform(rng);
      }
      d(j, i) = -d(i, j);
    }
  return AltMatrix(RingMatrix::from_dense(tag, std::move(d)));
}

namespace {

PadicRankReport padic_alt_report(const AltMatrix& a, unsigned margin) {
  return padic_report(snf_mod(a.entries()), a.n(), a.ring().exponent(), margin);
}

AltSample sample_from_report(const AltMatrix& a, const PadicRankReport& report) {
  AltSample s{a, report.rank_zero_divisors, AbelianInvariants::from_p_valuations(a.ring().prime(), report.valuations)};
  return s;
}

// Rank over Q of a small integer matrix (row-major, n x n) by Bareiss
// elimination in 64-bit arithmetic; false on overflow.
bool small_rank(std::vector<std::int64_t>& a, std::size_t n, std::size_t& rank) {
  std::int64_t prev = 1;
  std::size_t row = 0;
  for (std::size_t c = 0; c < n && row < n; ++c) {
    std::size_t piv = row;
    while (piv < n && a[piv * n + c] == 0) ++piv;
    if (piv == n) continue;
    if (piv != row)
      for (std::size_t j = 0; j < n; ++j) std::swap(a[piv * n + j], a[row * n + j]);
    const std::int64_t pv = a[row * n + c];
    for (std::size_t i = row + 1; i < n; ++i) {
      const std::int64_t f = a[i * n + c];
      for (std::size_t j = c + 1; j < n; ++j) {
        std::int64_t x, y, z;
        if (__builtin_mul_overflow(pv, a[i * n + j], &x) || __builtin_mul_overflow(f, a[row * n + j], &y) ||
            __builtin_sub_overflow(x, y, &z))
          return false;
        a[i * n + j] = z / prev;
      }
      a[i * n + c] = 0;
    }
    prev = pv;
    ++row;
  }
  rank = row;
  return true;
}

std::size_t alt_rank(const std::vector<std::int64_t>& entries, std::size_t n) {
  std::vector<std::int64_t> work = entries;
  std::size_t rank = 0;
  if (small_rank(work, n, rank)) return rank;
  Dense<mpz_class> d(n, n);
  for (std::size_t i = 0; i < n * n; ++i) d.data()[i] = static_cast<long>(entries[i]);
  return rational_rank(RingMatrix::from_dense(RingTag::integers(), std::move(d)));
}

void fill_alt(std::vector<std::int64_t>& a, std::size_t n, std::int64_t x, Rng& rng) {
  for (std::size_t i = 0; i < n; ++i) {
    a[i * n + i] = 0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::int64_t v = rng.between(-x, x);
      a[i * n + j] = v;
      a[j * n + i] = -v;
    }
  }
}

// Effective threshold for rk ker A >= r: the parity-adjusted r, or 0 when the
// answer is exactly 1, or n + 1 when it is exactly 0.
unsigned parity_threshold(std::size_t n, unsigned r) {
  if (r <= n % 2) return 0;
  unsigned t = r;
  if ((n - t) % 2 != 0 && t <= n) ++t;
  return t > n ? static_cast<unsigned>(n) + 1 : t;
}

}  // namespace

AltSample analyze(const AltMatrix& a, unsigned margin) {
  if (a.ring().is_integers()) {
    const auto info = coker_torsion(a.entries());
    return AltSample{a, static_cast<unsigned>(info.free_rank), info.torsion};
  }
  const auto report = padic_alt_report(a, margin);
  if (needs_escalation(report)) {
    throw UnstablePrecision("kernel rank not determined at precision " + std::to_string(a.ring().exponent()));
  }
  return sample_from_report(a, report);
}

AltSample sample_alt_padic_stable(std::size_t n, std::uint64_t p, Rng& rng, const PrecisionPolicy& policy) {
  policy.validate();
  unsigned e = policy.e_init;
  AltMatrix a = sample_alt_padic(n, p, e, rng);
  unsigned resamples = 0;
  for (;;) {
    const auto report = padic_alt_report(a, policy.margin);
    if (!needs_escalation(report)) {
      AltSample s = sample_from_report(a, report);
      s.resamples = resamples;
      return s;
    }
    if (2 * e > policy.e_max) {
      throw PrecisionCeiling("alternating kernel unresolved at precision " + std::to_string(e));
    }
    e *= 2;
    a.extend(e, rng);
    ++resamples;
  }
}

RankProbability prob_rank_ge(std::size_t n, std::uint64_t bound, unsigned r, std::uint64_t samples, Rng& rng) {
  if (n < 1 || bound < 1) throw Error("prob_rank_ge needs n >= 1 and X >= 1");
  RankProbability out;
  const unsigned t = parity_threshold(n, r);
  if (t == 0 || t > n) {
    out.exact = true;
    out.estimate = t == 0 ? 1 : 0;
    out.interval = {out.estimate, out.estimate, out.estimate};
    return out;
  }
  if (samples < 1) throw Error("prob_rank_ge needs at least one sample");
  const std::size_t max_rank = n - t;
  std::vector<std::int64_t> a(n * n);
  const auto x = static_cast<std::int64_t>(bound);
  for (std::uint64_t s = 0; s < samples; ++s) {
    fill_alt(a, n, x, rng);
    if (alt_rank(a, n) <= max_rank) ++out.hits;
  }
  out.samples = samples;
  out.interval = wilson_interval(out.hits, samples);
  out.estimate = out.interval.estimate;
  return out;
}

std::pair<std::uint64_t, std::uint64_t> exact_prob_rank_ge(std::size_t n, std::uint64_t bound, unsigned r,
                                                           std::uint64_t budget) {
  if (n < 1 || bound < 1) throw Error("exact_prob_rank_ge needs n >= 1 and X >= 1");
  const std::size_t cells = n * (n - 1) / 2;
  const std::uint64_t values = 2 * bound + 1;
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < cells; ++i) {
    if (total > budget / values) throw BudgetExceeded("enumeration of alternating matrices exceeds the budget");
    total *= values;
  }
  const unsigned t = parity_threshold(n, r);
  if (t == 0) return {total, total};
  if (t > n) return {0, total};
  const auto x = static_cast<std::int64_t>(bound);
  std::vector<std::int64_t> digits(cells, -x), a(n * n, 0);
  std::uint64_t hits = 0;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j, ++k) {
        a[i * n + j] = digits[k];
        a[j * n + i] = -digits[k];
      }
    if (alt_rank(a, n) <= n - t) ++hits;
    for (std::size_t c = 0; c < cells; ++c) {
      if (digits[c] < x) {
        ++digits[c];
        break;
      }
      digits[c] = -x;
    }
  }
  return {hits, total};
}

CokerHistogram conditioned_coker(std::size_t n, std::uint64_t p, unsigned r, std::uint64_t samples, Rng& rng,
                                 const PrecisionPolicy& policy, std::uint64_t budget) {
  if (r > n || (n - r) % 2 != 0) throw Error("conditioned_coker needs r <= n and n = r mod 2");
  CokerHistogram h;
  for (std::uint64_t s = 0; s < samples; ++s) {
    bool accepted = false;
    for (std::uint64_t attempt = 0; attempt < budget && !accepted; ++attempt) {
      try {
        AltSample a = sample_alt_padic_stable(n, p, rng, policy);
        if (a.pseudo_rank == r) {
          ++h.counts[a.pseudo_sha];
          accepted = true;
        } else {
          ++h.rejected;
        }
      } catch (const PrecisionCeiling&) {
        ++h.rejected;
      }
    }
    if (!accepted) {
      throw RejectionBudgetExceeded("no alternating matrix with kernel rank " + std::to_string(r) + " in " +
                                    std::to_string(budget) + " draws");
    }
  }
  return h;
}

mpz_class pfaffian(const RingMatrix& a) {
  if (a.rows() != a.cols() || !a.is_alternating()) throw Error("pfaffian needs an alternating matrix");
  const std::size_t n = a.rows();
  if (n % 2) return 0;
  if (n == 0) return 1;
  // Pf(A) = sum_j (-1)^(j+1) a_{0j} Pf(A with rows/cols 0, j removed).
  mpz_class total = 0;
  for (std::size_t j = 1; j < n; ++j) {
    if (a.at(0, j) == 0) continue;
    std::vector<std::size_t> keep;
    for (std::size_t k = 1; k < n; ++k)
      if (k != j) keep.push_back(k);
    RingMatrix sub(a.ring(), n - 2, n - 2);
    for (std::size_t u = 0; u < keep.size(); ++u)
      for (std::size_t v = 0; v < keep.size(); ++v) sub.set(u, v, a.at(keep[u], keep[v]));
    const mpz_class term = a.at(0, j) * pfaffian(sub);
    if (j % 2) total += term;
    else total -= term;
  }
  return total;
}

}  // namespace selmerlab
