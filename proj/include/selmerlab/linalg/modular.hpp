#pragma once

// Arithmetic in Z/p^e with canonical representatives in [0, p^e).
//
// Two interchangeable policies share one interface so that the local-ring
// kernels can be written once as templates:
//   WordModRing  p^e < 2^62, machine words, 128-bit products;
//   BigModRing   any p^e, GMP integers.
// Callers pick the word policy whenever the modulus fits and promote to the
// big one otherwise (see RingTag::fits_word).

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "selmerlab/core/rng.hpp"

namespace selmerlab {

class WordModRing {
 public:
  using value_type = std::uint64_t;

  WordModRing(std::uint64_t p, unsigned e);

  std::uint64_t p() const { return p_; }
  unsigned e() const { return e_; }
  value_type modulus() const { return m_; }

  value_type zero() const { return 0; }
  value_type one() const { return m_ == 1 ? 0 : 1; }
  bool is_zero(value_type a) const { return a == 0; }

  value_type add(value_type a, value_type b) const {
    const value_type s = a + b;
    return s >= m_ ? s - m_ : s;
  }
  value_type sub(value_type a, value_type b) const { return a >= b ? a - b : a + (m_ - b); }
  value_type neg(value_type a) const { return a == 0 ? 0 : m_ - a; }
  value_type mul(value_type a, value_type b) const {
    if (small_) return (a * b) % m_;
    return static_cast<value_type>((static_cast<unsigned __int128>(a) * b) % m_);
  }

  value_type from_int(std::int64_t x) const;
  value_type from_mpz(const mpz_class& x) const;
  mpz_class to_mpz(value_type a) const { return mpz_class(static_cast<unsigned long>(a)); }

  /// min(v_p(a), e); the zero element has valuation e.
  unsigned valuation(value_type a) const;
  /// Exact integer quotient a / p^v of the canonical representative.
  value_type div_p_power(value_type a, unsigned v) const { return a / pow_[v]; }
  /// p^k reduced mod p^e (zero once k >= e).
  value_type p_power(unsigned k) const { return k >= e_ ? 0 : pow_[k]; }
  /// Inverse of a unit (a not divisible by p).
  value_type inverse_unit(value_type a) const;

  value_type uniform(Rng& rng) const { return rng.below(m_); }

 private:
  std::uint64_t p_;
  unsigned e_;
  value_type m_;
  bool small_;
  std::vector<value_type> pow_;
};

class BigModRing {
 public:
  using value_type = mpz_class;

  BigModRing(std::uint64_t p, unsigned e);

  std::uint64_t p() const { return p_; }
  unsigned e() const { return e_; }
  const value_type& modulus() const { return m_; }

  value_type zero() const { return 0; }
  value_type one() const { return m_ == 1 ? 0 : 1; }
  bool is_zero(const value_type& a) const { return a == 0; }

  value_type add(const value_type& a, const value_type& b) const {
    value_type s = a + b;
    if (s >= m_) s -= m_;
    return s;
  }
  value_type sub(const value_type& a, const value_type& b) const {
    value_type s = a - b;
    if (s < 0) s += m_;
    return s;
  }
  value_type neg(const value_type& a) const { return a == 0 ? value_type(0) : value_type(m_ - a); }
  value_type mul(const value_type& a, const value_type& b) const {
    value_type r = a * b;
    mpz_mod(r.get_mpz_t(), r.get_mpz_t(), m_.get_mpz_t());
    return r;
  }

  value_type from_int(std::int64_t x) const;
  value_type from_mpz(const mpz_class& x) const;
  mpz_class to_mpz(const value_type& a) const { return a; }

  unsigned valuation(const value_type& a) const;
  value_type div_p_power(const value_type& a, unsigned v) const;
  value_type p_power(unsigned k) const;
  value_type inverse_unit(const value_type& a) const;

  /// Uniform residue, assembled from base-p digit blocks.
  value_type uniform(Rng& rng) const;

 private:
  std::uint64_t p_;
  unsigned e_;
  value_type m_;
};

}  // namespace selmerlab
