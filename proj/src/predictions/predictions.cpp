#include "selmerlab/predictions/predictions.hpp"

#include "selmerlab/core/error.hpp"
#include "selmerlab/linalg/ring.hpp"

namespace selmerlab {

namespace {

void require_prime(std::uint64_t p) {
  if (!is_prime(p)) throw Error(std::to_string(p) + " is not prime");
}

Decimal infinite_factor(std::uint64_t p) {
  const Decimal inv_p = Decimal(1) / Decimal(p);
  const Decimal cutoff("1e-45");
  Decimal prod = Decimal(1) / 2;  // j = 0
  Decimal pj = inv_p;
  while (pj > cutoff) {
    prod /= 1 + pj;
    pj *= inv_p;
  }
  return prod;
}

}  // namespace

Decimal sel_p_density(std::uint64_t p, unsigned s) {
  require_prime(p);
  Decimal value = infinite_factor(p);
  Decimal pj = 1;
  for (unsigned j = 1; j <= s; ++j) {
    pj *= p;
    value *= Decimal(p) / (pj - 1);
  }
  return value;
}

DensityTable density_table(std::uint64_t p, unsigned s_max) {
  require_prime(p);
  DensityTable t{p, {}};
  Decimal value = infinite_factor(p);
  Decimal pj = 1;
  t.entries.push_back(value);
  for (unsigned j = 1; j <= s_max; ++j) {
    pj *= p;
    value *= Decimal(p) / (pj - 1);
    t.entries.push_back(value);
  }
  return t;
}

mpz_class sigma(std::uint64_t m) {
  if (m < 1) throw Error("sigma needs m >= 1");
  mpz_class total = 0;
  for (std::uint64_t d = 1; d * d <= m; ++d) {
    if (m % d) continue;
    total += static_cast<unsigned long>(d);
    if (d != m / d) total += static_cast<unsigned long>(m / d);
  }
  return total;
}

mpz_class lagrangian_count(std::size_t n, std::uint64_t p) {
  if (n < 1) throw Error("lagrangian_count needs n >= 1");
  require_prime(p);
  mpz_class total = 1, pi = 1;
  for (std::size_t i = 0; i < n; ++i) {
    total *= pi + 1;
    pi *= static_cast<unsigned long>(p);
  }
  return total;
}

mpz_class lagrangian_count(std::size_t n, std::uint64_t p, unsigned e) {
  if (e < 1) throw Error("lagrangian_count needs e >= 1");
  mpz_class lifts;
  mpz_ui_pow_ui(lifts.get_mpz_t(), p, static_cast<unsigned long>((e - 1) * n * (n - 1) / 2));
  return lagrangian_count(n, p) * lifts;
}

Decimal zeta(unsigned k) {
  if (k < 2) throw Error("zeta needs k >= 2");
  const unsigned big_n = 1000;
  Decimal sum = 0;
  for (unsigned m = 1; m < big_n; ++m) sum += 1 / pow(Decimal(m), k);
  // sum_{m >= N} m^-k = N^(1-k)/(k-1) + N^-k/2 + k N^(-k-1)/12
  //                     - k(k+1)(k+2) N^(-k-3)/720 + ...
  const Decimal n = big_n;
  const Decimal kk = k;
  sum += pow(n, 1 - static_cast<int>(k)) / (kk - 1) + pow(n, -static_cast<int>(k)) / 2 +
         kk * pow(n, -static_cast<int>(k) - 1) / 12 -
         kk * (kk + 1) * (kk + 2) * pow(n, -static_cast<int>(k) - 3) / 720;
  return sum;
}

Decimal census_constant() {
  const Decimal two_43 = pow(Decimal(2), Decimal(4) / 3);
  const Decimal three_32 = pow(Decimal(3), Decimal(3) / 2);
  return two_43 / three_32 / zeta(10);
}

Decimal mean_selmer_check(std::uint64_t p) {
  require_prime(p);
  const Decimal cutoff("1e-12");
  Decimal value = infinite_factor(p);
  Decimal sum = value, ps = 1;
  for (unsigned s = 1;; ++s) {
    ps *= p;
    value *= Decimal(p) / (ps - 1);
    const Decimal term = ps * value;
    sum += term;
    if (term < cutoff) break;
  }
  return sum;
}

Decimal mean_intersection_finite(std::uint64_t p, std::size_t n) {
  require_prime(p);
  if (n < 1) throw Error("mean_intersection_finite needs n >= 1");
  const Decimal pn = pow(Decimal(p), static_cast<int>(n));
  return 1 + (pn - 1) / (pn / p + 1);
}

}  // namespace selmerlab
