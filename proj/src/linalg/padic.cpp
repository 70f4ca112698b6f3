#include "selmerlab/linalg/padic.hpp"

#include "selmerlab/core/error.hpp"

namespace selmerlab {

void PrecisionPolicy::validate() const {
  if (e_init < 2) throw Error("initial precision must be at least 2");
  if (e_max < e_init) throw Error("precision ceiling is below the initial precision");
  if (margin < 1) throw Error("precision margin must be at least 1");
}

std::vector<unsigned> snf_mod(const RingMatrix& m) {
  const RingTag& tag = m.ring();
  if (!tag.is_modular()) throw Error("snf_mod requires a matrix over Z/p^e");
  if (tag.fits_word()) {
    const WordModRing ring(tag.prime(), tag.exponent());
    return local_smith_valuations(ring, to_ring_dense(ring, m));
  }
  const BigModRing ring(tag.prime(), tag.exponent());
  return local_smith_valuations(ring, to_ring_dense(ring, m));
}

PadicRankReport padic_report(std::span<const unsigned> capped, std::size_t cols, unsigned e,
                             unsigned margin) {
  if (margin < 1) throw Error("precision margin must be at least 1");
  PadicRankReport report;
  report.precision_used = e;
  report.rank_zero_divisors = static_cast<unsigned>(cols - capped.size());
  const unsigned window_start = margin >= e ? 0 : e - margin;
  for (unsigned v : capped) {
    if (v >= e) {
      ++report.rank_zero_divisors;
      continue;
    }
    report.valuations.push_back(v);
    if (v >= window_start) report.stable = false;
  }
  return report;
}

PadicRankReport padic_kernel_rank(const RingMatrix& m, unsigned margin) {
  const auto capped = snf_mod(m);
  return padic_report(capped, m.cols(), m.ring().exponent(), margin);
}

unsigned kernel_order_exponent(std::span<const unsigned> capped, std::size_t cols, unsigned e) {
  unsigned total = 0;
  for (unsigned v : capped) total += v;
  return total + e * static_cast<unsigned>(cols - capped.size());
}

}  // namespace selmerlab
