#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace selmerlab {

enum class RingKind { Integers, ModPrimePower, PrimeField };

/// Coefficient ring: the integers, Z/p^e, or F_p.
///
/// F_p and Z/p^1 have identical arithmetic; the separate tag only records
/// which one the caller meant.
class RingTag {
 public:
  static RingTag integers() { return RingTag(RingKind::Integers, 0, 0); }
  static RingTag mod_prime_power(std::uint64_t p, unsigned e);
  static RingTag prime_field(std::uint64_t p);

  RingKind kind() const { return kind_; }
  bool is_integers() const { return kind_ == RingKind::Integers; }
  bool is_modular() const { return kind_ != RingKind::Integers; }

  /// Prime p (0 for the integers).
  std::uint64_t prime() const { return p_; }
  /// Precision e (1 for F_p, 0 for the integers).
  unsigned exponent() const { return e_; }
  /// p^e; zero for the integers.
  mpz_class modulus() const;
  /// True when p^e fits the word-sized fast path (p^e < 2^62).
  bool fits_word() const;

  /// Same prime at a different precision.
  RingTag with_exponent(unsigned e) const;

  std::string to_string() const;

  friend bool operator==(const RingTag&, const RingTag&) = default;

 private:
  RingTag(RingKind kind, std::uint64_t p, unsigned e) : kind_(kind), p_(p), e_(e) {}

  RingKind kind_;
  std::uint64_t p_;
  unsigned e_;
};

bool is_prime(std::uint64_t n);

/// p^e as an unsigned word; requires the result to fit.
std::uint64_t ipow(std::uint64_t p, unsigned e);

/// True when p^e < 2^62.
bool power_fits_word(std::uint64_t p, unsigned e);

}  // namespace selmerlab
