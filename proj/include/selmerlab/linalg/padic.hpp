#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "selmerlab/linalg/dense.hpp"
#include "selmerlab/linalg/matrix.hpp"
#include "selmerlab/linalg/modular.hpp"

namespace selmerlab {

inline constexpr unsigned kDefaultPrecisionMargin = 4;

/// What a matrix mod p^e says about the Z_p-kernel of its lift.
struct PadicRankReport {
  /// Divisors that read as 0 mod p^e, plus cols - rows for wide matrices.
  unsigned rank_zero_divisors = 0;
  /// Valuations v < e of the remaining elementary divisors, nondecreasing.
  std::vector<unsigned> valuations;
  unsigned precision_used = 0;
  /// No finite valuation lies in the window [e - margin, e).
  bool stable = true;
};

/// Working precision for models whose matrices are truncations of Z_p
/// matrices. Precision starts at e_init and doubles up to e_max.
struct PrecisionPolicy {
  unsigned e_init = 8;
  unsigned e_max = 64;
  unsigned margin = kDefaultPrecisionMargin;

  /// Throws Error unless 2 <= e_init <= e_max and margin >= 1.
  void validate() const;
};

/// True when a report of a model matrix cannot be trusted yet: a finite
/// valuation sits in the margin window, or two or more divisors read as
/// zero. The models have Z_p-kernel rank at most 1 almost surely, so a
/// second zero divisor is taken as a large finite one still to be resolved.
inline bool needs_escalation(const PadicRankReport& report) {
  return !report.stable || report.rank_zero_divisors >= 2;
}

/// Elementary-divisor valuations of an r x c matrix over Z/p^e, each capped
/// at e. Returns min(r, c) values in nondecreasing order. Only row
/// operations are needed: once a pivot column is cleared, the column
/// operations that would clear the pivot row cannot touch the trailing block.
template <class Ring>
std::vector<unsigned> local_smith_valuations(const Ring& ring, Dense<typename Ring::value_type> a) {
  using T = typename Ring::value_type;
  const std::size_t rows = a.rows(), cols = a.cols();
  const std::size_t k = std::min(rows, cols);
  const unsigned e = ring.e();
  std::vector<unsigned> out;
  out.reserve(k);
  for (std::size_t t = 0; t < k; ++t) {
    unsigned best = e;
    std::size_t bi = t, bj = t;
    for (std::size_t i = t; i < rows && best > 0; ++i) {
      for (std::size_t j = t; j < cols; ++j) {
        if (ring.is_zero(a(i, j))) continue;
        const unsigned v = ring.valuation(a(i, j));
        if (v < best) {
          best = v;
          bi = i;
          bj = j;
          if (v == 0) break;
        }
      }
    }
    if (best == e) {
      out.resize(k, e);
      return out;
    }
    a.swap_rows(t, bi);
    a.swap_cols(t, bj);
    const T inv = ring.inverse_unit(ring.div_p_power(a(t, t), best));
    for (std::size_t i = t + 1; i < rows; ++i) {
      if (ring.is_zero(a(i, t))) continue;
      const T factor = ring.mul(ring.div_p_power(a(i, t), best), inv);
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (!ring.is_zero(a(t, j))) a(i, j) = ring.sub(a(i, j), ring.mul(factor, a(t, j)));
      }
      a(i, t) = ring.zero();
    }
    out.push_back(best);
  }
  return out;
}

/// Elementary-divisor valuations of M over Z/p^e (entries min(v_i, e)),
/// nondecreasing, min(rows, cols) of them.
std::vector<unsigned> snf_mod(const RingMatrix& m);

/// Kernel rank of the Z_p-lift as far as precision e can tell.
PadicRankReport padic_kernel_rank(const RingMatrix& m, unsigned margin = kDefaultPrecisionMargin);

/// Builds the report from capped valuations of an r x c matrix.
PadicRankReport padic_report(std::span<const unsigned> capped, std::size_t cols, unsigned e,
                             unsigned margin);

/// log_p of the number of x in (Z/p^e)^cols with M x = 0.
unsigned kernel_order_exponent(std::span<const unsigned> capped, std::size_t cols, unsigned e);

/// Converts the canonical entries of a modular RingMatrix to ring elements.
template <class Ring>
Dense<typename Ring::value_type> to_ring_dense(const Ring& ring, const RingMatrix& m) {
  Dense<typename Ring::value_type> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = ring.from_mpz(m.at(i, j));
  return out;
}

}  // namespace selmerlab
