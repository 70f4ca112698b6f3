#include "selmerlab/linalg/ring.hpp"

#include <limits>

#include "selmerlab/core/error.hpp"

namespace selmerlab {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

bool power_fits_word(std::uint64_t p, unsigned e) {
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 62;
  std::uint64_t acc = 1;
  for (unsigned i = 0; i < e; ++i) {
    if (acc > (kLimit - 1) / p) return false;
    acc *= p;
  }
  return true;
}

std::uint64_t ipow(std::uint64_t p, unsigned e) {
  std::uint64_t acc = 1;
  for (unsigned i = 0; i < e; ++i) acc *= p;
  return acc;
}

RingTag RingTag::mod_prime_power(std::uint64_t p, unsigned e) {
  if (!is_prime(p)) throw Error("ring modulus base " + std::to_string(p) + " is not prime");
  if (e < 1) throw Error("ring exponent must be at least 1");
  return RingTag(RingKind::ModPrimePower, p, e);
}

RingTag RingTag::prime_field(std::uint64_t p) {
  if (!is_prime(p)) throw Error("field characteristic " + std::to_string(p) + " is not prime");
  return RingTag(RingKind::PrimeField, p, 1);
}

mpz_class RingTag::modulus() const {
  if (is_integers()) return 0;
  mpz_class m;
  mpz_ui_pow_ui(m.get_mpz_t(), p_, e_);
  return m;
}

bool RingTag::fits_word() const { return is_modular() && power_fits_word(p_, e_); }

RingTag RingTag::with_exponent(unsigned e) const {
  if (is_integers()) throw Error("the integers have no precision");
  if (e == 1 && kind_ == RingKind::PrimeField) return *this;
  return mod_prime_power(p_, e);
}

std::string RingTag::to_string() const {
  switch (kind_) {
    case RingKind::Integers:
      return "Z";
    case RingKind::PrimeField:
      return "F_" + std::to_string(p_);
    case RingKind::ModPrimePower:
      return "Z/" + std::to_string(p_) + "^" + std::to_string(e_);
  }
  return "?";
}

}  // namespace selmerlab
