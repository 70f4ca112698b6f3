#include "selmerlab/quadratic/quad_space.hpp"

#include "selmerlab/core/error.hpp"

namespace selmerlab {

QuadSpace::QuadSpace(RingTag ring, std::size_t half_dim) : ring_(ring), n_(half_dim) {
  if (half_dim < 1) throw Error("a quadratic space needs half-dimension at least 1");
}

namespace {

mpz_class reduce(const QuadSpace& space, mpz_class x) {
  if (space.ring().is_modular()) {
    const mpz_class m = space.ring().modulus();
    mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
  }
  return x;
}

void check_length(const QuadSpace& space, std::size_t len) {
  if (len != space.dim()) {
    throw DimensionMismatch("vector of length " + std::to_string(len) + " in a space of dimension " +
                            std::to_string(space.dim()));
  }
}

}  // namespace

mpz_class eval_form(const QuadSpace& space, std::span<const mpz_class> v) {
  check_length(space, v.size());
  const std::size_t n = space.half_dim();
  mpz_class acc = 0;
  for (std::size_t i = 0; i < n; ++i) acc += v[i] * v[n + i];
  return reduce(space, std::move(acc));
}

mpz_class pairing(const QuadSpace& space, std::span<const mpz_class> u, std::span<const mpz_class> v) {
  check_length(space, u.size());
  check_length(space, v.size());
  const std::size_t n = space.half_dim();
  mpz_class acc = 0;
  for (std::size_t i = 0; i < n; ++i) acc += u[i] * v[n + i] + u[n + i] * v[i];
  return reduce(space, std::move(acc));
}

}  // namespace selmerlab
