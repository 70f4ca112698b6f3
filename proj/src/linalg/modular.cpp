#include "selmerlab/linalg/modular.hpp"

#include "selmerlab/core/error.hpp"
#include "selmerlab/linalg/ring.hpp"

namespace selmerlab {

WordModRing::WordModRing(std::uint64_t p, unsigned e) : p_(p), e_(e) {
  if (!power_fits_word(p, e)) throw Error("modulus does not fit the word-sized ring");
  pow_.resize(e + 1);
  pow_[0] = 1;
  for (unsigned k = 1; k <= e; ++k) pow_[k] = pow_[k - 1] * p;
  m_ = pow_[e];
  small_ = m_ < (std::uint64_t{1} << 32);
}

WordModRing::value_type WordModRing::from_int(std::int64_t x) const {
  const auto m = static_cast<std::int64_t>(m_);
  std::int64_t r = x % m;
  if (r < 0) r += m;
  return static_cast<value_type>(r);
}

WordModRing::value_type WordModRing::from_mpz(const mpz_class& x) const {
  mpz_class r;
  mpz_fdiv_r_ui(r.get_mpz_t(), x.get_mpz_t(), m_);
  return r.get_ui();
}

unsigned WordModRing::valuation(value_type a) const {
  if (a == 0) return e_;
  unsigned v = 0;
  if (p_ == 2) return static_cast<unsigned>(__builtin_ctzll(a));
  while (a % p_ == 0) {
    a /= p_;
    ++v;
  }
  return v;
}

WordModRing::value_type WordModRing::inverse_unit(value_type a) const {
  // Extended Euclid on signed values; m < 2^62 keeps everything in range.
  std::int64_t old_r = static_cast<std::int64_t>(a % m_), r = static_cast<std::int64_t>(m_);
  std::int64_t old_s = 1, s = 0;
  while (r != 0) {
    const std::int64_t q = old_r / r;
    std::int64_t t = old_r - q * r;
    old_r = r;
    r = t;
    t = old_s - q * s;
    old_s = s;
    s = t;
  }
  if (old_r != 1 && m_ != 1) throw Error("inverse_unit called on a non-unit");
  return from_int(old_s);
}

BigModRing::BigModRing(std::uint64_t p, unsigned e) : p_(p), e_(e) {
  mpz_ui_pow_ui(m_.get_mpz_t(), p, e);
}

BigModRing::value_type BigModRing::from_int(std::int64_t x) const {
  value_type r(static_cast<long>(x));
  mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), m_.get_mpz_t());
  return r;
}

BigModRing::value_type BigModRing::from_mpz(const mpz_class& x) const {
  value_type r;
  mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), m_.get_mpz_t());
  return r;
}

unsigned BigModRing::valuation(const value_type& a) const {
  if (a == 0) return e_;
  if (p_ == 2) return static_cast<unsigned>(mpz_scan1(a.get_mpz_t(), 0));
  mpz_class pp(static_cast<unsigned long>(p_));
  mpz_class rest;
  const auto v = mpz_remove(rest.get_mpz_t(), a.get_mpz_t(), pp.get_mpz_t());
  return static_cast<unsigned>(v);
}

BigModRing::value_type BigModRing::div_p_power(const value_type& a, unsigned v) const {
  value_type r;
  mpz_class pv;
  mpz_ui_pow_ui(pv.get_mpz_t(), p_, v);
  mpz_divexact(r.get_mpz_t(), a.get_mpz_t(), pv.get_mpz_t());
  return r;
}

BigModRing::value_type BigModRing::p_power(unsigned k) const {
  if (k >= e_) return 0;
  value_type r;
  mpz_ui_pow_ui(r.get_mpz_t(), p_, k);
  return r;
}

BigModRing::value_type BigModRing::inverse_unit(const value_type& a) const {
  value_type r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m_.get_mpz_t()) == 0) {
    throw Error("inverse_unit called on a non-unit");
  }
  return r;
}

BigModRing::value_type BigModRing::uniform(Rng& rng) const {
  unsigned chunk = 1;
  while (power_fits_word(p_, chunk + 1)) ++chunk;
  value_type acc = 0;
  value_type scale = 1;
  unsigned remaining = e_;
  while (remaining > 0) {
    const unsigned digits = remaining < chunk ? remaining : chunk;
    const std::uint64_t block = rng.below(ipow(p_, digits));
    acc += scale * mpz_class(static_cast<unsigned long>(block));
    mpz_class step;
    mpz_ui_pow_ui(step.get_mpz_t(), p_, digits);
    scale *= step;
    remaining -= digits;
  }
  return acc;
}

}  // namespace selmerlab
