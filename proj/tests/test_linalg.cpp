#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "doctest.h"
#include "selmerlab/core/error.hpp"
#include "selmerlab/core/rng.hpp"
#include "selmerlab/linalg/padic.hpp"
#include "selmerlab/linalg/smith.hpp"

using namespace selmerlab;

namespace {

const RingTag kZ = RingTag::integers();

std::vector<long> as_longs(const std::vector<mpz_class>& v) {
  std::vector<long> out;
  for (const auto& x : v) out.push_back(x.get_si());
  return out;
}

RingMatrix random_matrix(Rng& rng, std::size_t r, std::size_t c, long bound) {
  RingMatrix m(kZ, r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m.set(i, j, rng.between(-bound, bound));
  return m;
}

RingMatrix random_alternating(Rng& rng, std::size_t n, long bound) {
  RingMatrix m(kZ, n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const long x = rng.between(-bound, bound);
      m.set(i, j, x);
      m.set(j, i, -x);
    }
  return m;
}

// Determinant of the k x k minor on the given rows and columns.
mpz_class minor(const RingMatrix& m, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
  RingMatrix sub(kZ, rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) sub.set(i, j, m.at(rows[i], cols[j]));
  return determinant(sub);
}

void subsets(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t>& cur,
             std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

// Invariant factors from determinantal divisors: D_k = gcd of k x k minors,
// d_k = D_k / D_(k-1). Independent of any elimination.
std::pair<std::size_t, std::vector<mpz_class>> determinantal(const RingMatrix& m) {
  std::vector<mpz_class> big_d{1};
  for (std::size_t k = 1; k <= std::min(m.rows(), m.cols()); ++k) {
    std::vector<std::vector<std::size_t>> rs, cs;
    std::vector<std::size_t> cur;
    subsets(m.rows(), k, 0, cur, rs);
    subsets(m.cols(), k, 0, cur, cs);
    mpz_class g = 0;
    for (const auto& r : rs)
      for (const auto& c : cs) {
        const mpz_class d = minor(m, r, c);
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
      }
    if (g == 0) break;
    big_d.push_back(g);
  }
  const std::size_t rank = big_d.size() - 1;
  std::vector<mpz_class> inv;
  for (std::size_t k = 1; k <= rank; ++k) inv.push_back(big_d[k] / big_d[k - 1]);
  return {rank, inv};
}

unsigned vp(mpz_class x, std::uint64_t p) {
  unsigned v = 0;
  while (x != 0 && x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}

// log_p |coker(M) / p^j| by enumerating every input vector mod p^j.
unsigned coset_count_exponent(const RingMatrix& m, std::uint64_t p, unsigned j) {
  std::uint64_t q = 1;
  for (unsigned i = 0; i < j; ++i) q *= p;
  std::uint64_t inputs = 1;
  for (std::size_t i = 0; i < m.cols(); ++i) inputs *= q;
  std::set<std::vector<std::uint64_t>> image;
  for (std::uint64_t idx = 0; idx < inputs; ++idx) {
    std::vector<std::int64_t> x(m.cols());
    std::uint64_t t = idx;
    for (auto& xi : x) {
      xi = static_cast<std::int64_t>(t % q);
      t /= q;
    }
    std::vector<std::uint64_t> y(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
      std::int64_t acc = 0;
      for (std::size_t c = 0; c < m.cols(); ++c) acc += m.at(r, c).get_si() * x[c];
      const auto s = static_cast<std::int64_t>(q);
      y[r] = static_cast<std::uint64_t>(((acc % s) + s) % s);
    }
    image.insert(std::move(y));
  }
  unsigned log_image = 0;
  for (std::size_t size = image.size(); size > 1; size /= p) ++log_image;
  return j * static_cast<unsigned>(m.rows()) - log_image;
}

void check_against_oracles(const RingMatrix& m) {
  const auto info = coker_torsion(m);
  const auto [rank, inv] = determinantal(m);
  CHECK(rational_rank(m) == rank);
  CHECK(info.free_rank == m.rows() - rank);
  std::vector<mpz_class> expected;
  for (const auto& d : inv)
    if (d > 1) expected.push_back(d);
  CHECK(info.torsion == AbelianInvariants(expected));

  mpz_class order = info.torsion.order();
  for (std::uint64_t p = 2; p <= 50 && order > 1; ++p) {
    if (!is_prime(p) || order % p != 0) continue;
    const unsigned j = vp(order, p) + 1;
    double work = 1;
    for (std::size_t c = 0; c < m.cols(); ++c) work *= std::pow(static_cast<double>(p), j);
    if (work > 2e5) continue;
    unsigned expected_exp = j * static_cast<unsigned>(info.free_rank);
    for (const auto& d : info.torsion.factors()) expected_exp += std::min(vp(d, p), j);
    CHECK(coset_count_exponent(m, p, j) == expected_exp);
  }
}

}  // namespace

TEST_CASE("ring tags validate their parameters") {
  CHECK_THROWS_AS(RingTag::mod_prime_power(4, 2), Error);
  CHECK_THROWS_AS(RingTag::mod_prime_power(3, 0), Error);
  CHECK_THROWS_AS(RingTag::prime_field(1), Error);
  CHECK(RingTag::mod_prime_power(3, 4).modulus() == 81);
  CHECK(RingTag::prime_field(5).exponent() == 1);
  CHECK(RingTag::mod_prime_power(2, 61).fits_word());
  CHECK_FALSE(RingTag::mod_prime_power(2, 62).fits_word());
}

TEST_CASE("modular matrices hold canonical entries") {
  const auto m = RingMatrix::from_rows(RingTag::mod_prime_power(3, 2), {{-1, 10}, {9, 81}});
  CHECK(m.at(0, 0) == 8);
  CHECK(m.at(0, 1) == 1);
  CHECK(m.at(1, 0) == 0);
  CHECK(m.at(1, 1) == 0);
}

TEST_CASE("smith normal form examples") {
  CHECK(as_longs(smith_divisors(RingMatrix::identity(kZ, 3))) == std::vector<long>{1, 1, 1});
  CHECK(as_longs(smith_divisors(RingMatrix::from_rows(kZ, {{0, 2}, {-2, 0}}))) == std::vector<long>{2, 2});
  CHECK(as_longs(smith_divisors(RingMatrix::from_rows(kZ, {{0, 0}, {0, 0}}))) == std::vector<long>{0, 0});
  CHECK(as_longs(smith_divisors(RingMatrix::from_rows(kZ, {{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}}))) ==
        std::vector<long>{2, 6, 12});
}

TEST_CASE("coker_torsion examples") {
  auto c = coker_torsion(RingMatrix::from_rows(kZ, {{0, 2}, {-2, 0}}));
  CHECK(c.free_rank == 0);
  CHECK(c.torsion.to_string() == "[2,2]");
  c = coker_torsion(RingMatrix(kZ, 3, 3));
  CHECK(c.free_rank == 3);
  CHECK(c.torsion.trivial());
  c = coker_torsion(RingMatrix::from_rows(kZ, {{0, 1}, {-1, 0}}));
  CHECK(c.free_rank == 0);
  CHECK(c.torsion.trivial());
}

TEST_CASE("rational_kernel_rank examples") {
  CHECK(rational_kernel_rank(RingMatrix(kZ, 3, 3)) == 3);
  CHECK(rational_kernel_rank(RingMatrix::from_rows(kZ, {{0, 1}, {-1, 0}})) == 0);
  CHECK(rational_kernel_rank(RingMatrix::from_rows(kZ, {{0, 2, 0}, {-2, 0, 0}, {0, 0, 0}})) == 1);
}

TEST_CASE("rational rank survives word overflow") {
  // Rank-deficient with huge entries: row 2 = row 0 + row 1.
  const long big = 3'000'000'000L;
  RingMatrix m = RingMatrix::from_rows(kZ, {{big, 7, big - 1, 5}, {3, big, 11, big + 2}, {0, 0, 0, 0}, {1, 2, 3, 4}});
  for (std::size_t j = 0; j < 4; ++j) m.set(2, j, m.at(0, j) + m.at(1, j));
  CHECK(rational_rank(m) == 3);
}

TEST_CASE("padic_kernel_rank examples") {
  const auto r8 = RingTag::mod_prime_power(2, 8);
  auto rep = padic_kernel_rank(RingMatrix::identity(r8, 2), 2);
  CHECK(rep.rank_zero_divisors == 0);
  CHECK(rep.stable);
  rep = padic_kernel_rank(RingMatrix::diagonal(r8, {4, 0}), 2);
  CHECK(rep.rank_zero_divisors == 1);
  CHECK(rep.valuations == std::vector<unsigned>{2});
  CHECK(rep.stable);
  CHECK(rep.precision_used == 8);
  rep = padic_kernel_rank(RingMatrix::diagonal(r8, {128, 1}), 2);
  CHECK_FALSE(rep.stable);
  CHECK_THROWS_AS(padic_kernel_rank(RingMatrix::identity(r8, 2), 0), Error);
}

TEST_CASE("snf_mod examples") {
  CHECK(snf_mod(RingMatrix::identity(RingTag::mod_prime_power(3, 4), 3)) == std::vector<unsigned>{0, 0, 0});
  CHECK(snf_mod(RingMatrix::diagonal(RingTag::mod_prime_power(3, 4), {3, 9})) == std::vector<unsigned>{1, 2});
  CHECK(snf_mod(RingMatrix::from_rows(RingTag::mod_prime_power(2, 5), {{0, 2}, {2, 0}})) ==
        std::vector<unsigned>{1, 1});
}

TEST_CASE("snf_mod agrees with integer SNF and counts the kernel") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t r = 1 + rng.below(4), c = 1 + rng.below(4);
    const RingMatrix m = random_matrix(rng, r, c, 6);
    for (std::uint64_t p : {2, 3}) {
      const unsigned e = 5;
      const auto capped = snf_mod(m.reinterpret(RingTag::mod_prime_power(p, e)));
      std::vector<unsigned> expected;
      for (const auto& d : smith_divisors(m)) expected.push_back(d == 0 ? e : std::min(vp(d, p), e));
      std::sort(expected.begin(), expected.end());
      CHECK(capped == expected);
    }
  }
  // Kernel order mod p^e by brute force on small shapes.
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t r = 1 + rng.below(3), c = 1 + rng.below(3);
    const RingMatrix m = random_matrix(rng, r, c, 4);
    const std::uint64_t p = 2;
    const unsigned e = 3;
    const std::uint64_t q = 8;
    std::uint64_t inputs = 1, kernel = 0;
    for (std::size_t i = 0; i < c; ++i) inputs *= q;
    for (std::uint64_t idx = 0; idx < inputs; ++idx) {
      std::vector<long> x(c);
      std::uint64_t t = idx;
      for (auto& xi : x) {
        xi = static_cast<long>(t % q);
        t /= q;
      }
      bool zero = true;
      for (std::size_t i = 0; i < r && zero; ++i) {
        long acc = 0;
        for (std::size_t j = 0; j < c; ++j) acc += m.at(i, j).get_si() * x[j];
        zero = acc % static_cast<long>(q) == 0;
      }
      kernel += zero;
    }
    const auto capped = snf_mod(m.reinterpret(RingTag::mod_prime_power(p, e)));
    CHECK(kernel == (std::uint64_t{1} << kernel_order_exponent(capped, c, e)));
  }
}

TEST_CASE("snf_mod promotes to big integers past a machine word") {
  const auto ring = RingTag::mod_prime_power(3, 50);
  mpz_class big;
  mpz_ui_pow_ui(big.get_mpz_t(), 3, 45);
  const auto m = RingMatrix::diagonal(ring, {big, 2 * big, 0});
  CHECK(snf_mod(m) == std::vector<unsigned>{45, 45, 50});
  const auto rep = padic_kernel_rank(m, 4);
  CHECK(rep.rank_zero_divisors == 1);
  CHECK(rep.stable);
}

TEST_CASE("property: SNF transforms verify and divisors chain") {
  Rng rng(1);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t r = 1 + rng.below(5), c = 1 + rng.below(5);
    const RingMatrix m = random_matrix(rng, r, c, trial % 2 ? 9 : 2);
    const auto snf = smith_normal_form(m);
    std::vector<mpz_class> diag(std::min(r, c));
    RingMatrix d(kZ, r, c);
    for (std::size_t i = 0; i < snf.divisors.size(); ++i) d.set(i, i, snf.divisors[i]);
    CHECK(snf.U * m * snf.V == d);
    CHECK(abs(determinant(snf.U)) == 1);
    CHECK(abs(determinant(snf.V)) == 1);
    for (std::size_t i = 0; i + 1 < snf.divisors.size(); ++i) {
      CHECK(snf.divisors[i] >= 0);
      if (snf.divisors[i + 1] != 0) {
        CHECK(snf.divisors[i] != 0);
        CHECK(snf.divisors[i + 1] % snf.divisors[i] == 0);
      }
    }
    CHECK(snf.divisors == smith_divisors(m));
  }
}

TEST_CASE("property: coker_torsion matches determinantal and coset oracles") {
  Rng rng(2);
  // Every 1x1, 1x2, 2x1 and 2x2 matrix with entries in [-3, 3].
  for (std::size_t r = 1; r <= 2; ++r) {
    for (std::size_t c = 1; c <= 2; ++c) {
      const std::size_t cells = r * c;
      std::size_t total = 1;
      for (std::size_t i = 0; i < cells; ++i) total *= 7;
      for (std::size_t idx = 0; idx < total; ++idx) {
        RingMatrix m(kZ, r, c);
        std::size_t t = idx;
        for (std::size_t k = 0; k < cells; ++k) {
          m.set(k / c, k % c, static_cast<long>(t % 7) - 3);
          t /= 7;
        }
        check_against_oracles(m);
      }
    }
  }
  // Shapes with a side of 3 are sampled.
  for (int trial = 0; trial < 3000; ++trial) {
    std::size_t r = 1 + rng.below(3), c = 1 + rng.below(3);
    if (r < 3 && c < 3) r = 3;
    check_against_oracles(random_matrix(rng, r, c, 3));
  }
}

TEST_CASE("property: alternating matrices have even rank and square torsion") {
  Rng rng(3);
  for (int trial = 0; trial < 1500; ++trial) {
    const std::size_t n = 1 + rng.below(7);
    const RingMatrix m = random_alternating(rng, n, trial % 3 == 0 ? 1 : 6);
    REQUIRE(m.is_alternating());
    CHECK(rational_rank(m) % 2 == 0);
    CHECK(rational_kernel_rank(m) % 2 == n % 2);
    const auto info = coker_torsion(m);
    CHECK(info.torsion.factors_paired());
    CHECK(info.torsion.has_square_order());
    CHECK(is_perfect_square(info.torsion.order()));
  }
}

TEST_CASE("abelian invariants") {
  CHECK_THROWS_AS(AbelianInvariants({2, 3}), Error);
  CHECK_THROWS_AS(AbelianInvariants({1}), Error);
  const auto a = AbelianInvariants::from_p_valuations(3, {2, 0, 1, 1});
  CHECK(a.to_string() == "[3,3,9]");
  CHECK(a.order() == 81);
  CHECK(a.has_square_order());
  CHECK_FALSE(a.factors_paired());
  CHECK(AbelianInvariants({2, 2}) < AbelianInvariants({3, 3}));
  CHECK(AbelianInvariants({4}) < AbelianInvariants({2, 2, 2}));
}
