#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <span>

#include "selmerlab/linalg/ring.hpp"

namespace selmerlab {

/// The hyperbolic module R^{2n} with Q(x_1..x_n, y_1..y_n) = x_1 y_1 + ... + x_n y_n.
///
/// Coordinates are ordered (x_1, ..., x_n, y_1, ..., y_n). The associated
/// bilinear pairing <u, v> = Q(u + v) - Q(u) - Q(v) pairs x_i with y_i.
class QuadSpace {
 public:
  QuadSpace(RingTag ring, std::size_t half_dim);

  const RingTag& ring() const { return ring_; }
  std::size_t half_dim() const { return n_; }
  std::size_t dim() const { return 2 * n_; }

  QuadSpace with_exponent(unsigned e) const { return QuadSpace(ring_.with_exponent(e), n_); }

  friend bool operator==(const QuadSpace&, const QuadSpace&) = default;

 private:
  RingTag ring_;
  std::size_t n_;
};

/// Q(v), reduced into the ring.
mpz_class eval_form(const QuadSpace& space, std::span<const mpz_class> v);

/// <u, v> = sum_i (u_{x_i} v_{y_i} + u_{y_i} v_{x_i}), reduced into the ring.
mpz_class pairing(const QuadSpace& space, std::span<const mpz_class> u, std::span<const mpz_class> v);

}  // namespace selmerlab
