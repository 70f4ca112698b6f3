#include <boost/math/constants/constants.hpp>

#include "doctest.h"
#include "selmerlab/census/census.hpp"
#include "selmerlab/core/error.hpp"
#include "selmerlab/core/rng.hpp"
#include "selmerlab/predictions/predictions.hpp"
#include "selmerlab/quadratic/lagrangian.hpp"

using namespace selmerlab;

namespace {

bool near(const Decimal& a, const Decimal& b, const char* tol) { return abs(a - b) < Decimal(tol); }

}  // namespace

TEST_CASE("sel_p_density") {
  CHECK(near(sel_p_density(2, 0), Decimal("0.209712"), "1e-6"));
  CHECK(sel_p_density(2, 1) == 2 * sel_p_density(2, 0));
  for (std::uint64_t p : {2, 3, 5, 7}) {
    Decimal sum = 0;
    for (const auto& d : density_table(p, 60).entries) {
      CHECK(d >= 0);
      sum += d;
    }
    CHECK(near(sum, 1, "1e-9"));
  }
  CHECK(density_table(3, 5).entries[5] == sel_p_density(3, 5));
  CHECK_THROWS_AS(sel_p_density(4, 0), Error);
}

TEST_CASE("sigma") {
  CHECK(sigma(1) == 1);
  CHECK(sigma(4) == 7);
  CHECK(sigma(5) == 6);
  CHECK(sigma(12) == 28);
  CHECK(sigma(9) == 13);
}

TEST_CASE("lagrangian_count") {
  for (std::uint64_t p : {2, 3, 5, 7}) CHECK(lagrangian_count(1, p) == 2);
  CHECK(lagrangian_count(2, 2) == 6);
  CHECK(lagrangian_count(2, 3) == 8);
  struct Case {
    std::uint64_t p;
    std::size_t n;
    unsigned e;
  };
  for (const Case c : {Case{2, 1, 1}, Case{3, 1, 1}, Case{5, 1, 1}, Case{2, 2, 1}, Case{3, 2, 1}, Case{2, 3, 1},
                       Case{2, 1, 3}, Case{2, 2, 2}, Case{3, 2, 2}, Case{2, 2, 3}}) {
    const QuadSpace s(c.e == 1 ? RingTag::prime_field(c.p) : RingTag::mod_prime_power(c.p, c.e), c.n);
    CHECK(lagrangian_count(c.n, c.p, c.e) == enumerate_lagrangians(s).size());
  }
}

TEST_CASE("census constant and zeta") {
  const Decimal z10 = zeta(10);
  CHECK(z10 > 1);
  CHECK(z10 < Decimal("1.001"));
  const Decimal pi = boost::math::constants::pi<Decimal>();
  CHECK(near(z10, pow(pi, 10) / 93555, "1e-40"));
  CHECK(near(zeta(2), pi * pi / 6, "1e-15"));
  const Decimal c = census_constant();
  CHECK(near(c, Decimal("0.4845"), "1e-4"));
  CHECK(c < pow(Decimal(2), Decimal(4) / 3) / pow(Decimal(3), Decimal(3) / 2));
}

TEST_CASE("mean_selmer_check equals p + 1") {
  for (std::uint64_t p : {2, 3, 5, 7}) CHECK(near(mean_selmer_check(p), p + 1, "1e-6"));
}

TEST_CASE("finite-n mean intersection tends to p + 1") {
  CHECK(mean_intersection_finite(2, 1) == Decimal("1.5"));
  CHECK(near(mean_intersection_finite(3, 40), 4, "1e-15"));
}

TEST_CASE("height") {
  CHECK(height(0, 1) == 27);
  CHECK(height(1, 0) == 4);
  CHECK(height(-2, 1) == 32);
}

TEST_CASE("count_curves examples") {
  CHECK(count_curves(100).count == 14);
  CHECK(count_curves(3).count == 0);
  CHECK(count_curves(4).count == 2);  // (1, 0) and (-1, 0)
  CHECK(max_abs_A(100) == 2);
  CHECK(max_abs_B(100) == 1);
  CHECK(max_abs_A(4 * 27 * 27 * 27) == 27);
  CHECK(max_abs_B(27 * 49) == 7);
}

TEST_CASE("count_curves agrees with brute force and is monotone") {
  std::uint64_t prev = 0;
  for (std::uint64_t H = 1; H <= 200000; H = H * 3 / 2 + 1) {
    const auto rec = count_curves(H);
    CHECK(rec.count >= prev);
    prev = rec.count;
    if (H > 20000) continue;
    std::uint64_t brute = 0;
    for (std::int64_t A = -30; A <= 30; ++A)
      for (std::int64_t B = -30; B <= 30; ++B) brute += height(A, B) <= H && is_minimal_curve(A, B);
    CHECK(rec.count == brute);
  }
  CHECK(count_curves(1000000, 3).count == count_curves(1000000, 1).count);
}

TEST_CASE("counted curves satisfy both invariants") {
  Rng rng(1);
  std::uint64_t seen = 0, checked = 0;
  const std::uint64_t H = 100000000;
  const double keep = 1e4 / static_cast<double>(count_curves(H).count);
  for_each_curve(H, [&](const CurveKey& c) {
    ++seen;
    if (rng.uniform01() >= keep) return;
    ++checked;
    CHECK(height(c.A, c.B) <= H);
    CHECK(is_minimal_curve(c.A, c.B));
  });
  CHECK(seen == count_curves(H).count);
  CHECK(checked > 9000);
  // Pairs that are excluded: singular, or p^4 | A and p^6 | B.
  CHECK_FALSE(is_minimal_curve(-3, 2));
  CHECK_FALSE(is_minimal_curve(16, 64));
  CHECK_FALSE(is_minimal_curve(16, 0));
  CHECK_FALSE(is_minimal_curve(0, 64));
  CHECK(is_minimal_curve(16, 32));
  CHECK(is_minimal_curve(0, 32));
}

TEST_CASE("census asymptotic") {
  const double c = census_constant().convert_to<double>();
  CHECK(std::abs(count_curves(100000000).normalized / c - 1) < 0.05);
  CHECK(std::abs(count_curves(10000000000ULL).normalized / c - 1) < 0.02);
}

TEST_CASE("density_of") {
  const std::vector<std::uint64_t> grid{1000, 100000, 10000000, 1000000000};
  for (const auto& r : density_of([](const CurveKey&) { return true; }, grid)) {
    CHECK(r.density == 1);
    CHECK(r.total == count_curves(r.H).count);
  }
  for (const auto& r : density_of([](const CurveKey&) { return false; }, grid)) CHECK(r.density == 0);
  const auto b0 = density_of([](const CurveKey& c) { return c.B == 0; }, grid);
  for (std::size_t i = 1; i < b0.size(); ++i) CHECK(b0[i].density < b0[i - 1].density);
  CHECK(b0.back().density < 0.01);
}
