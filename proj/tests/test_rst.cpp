#include <cmath>
#include <set>

#include "doctest.h"
#include "selmerlab/core/error.hpp"
#include "selmerlab/rst/rst.hpp"

using namespace selmerlab;

namespace {

unsigned capped_zero_count(const Lagrangian& z, const Lagrangian& w) {
  unsigned count = 0;
  for (unsigned v : intersection_valuations(z, w)) count += v >= z.precision();
  return count;
}

std::size_t brute_intersection(const Lagrangian& z, const Lagrangian& w) {
  auto elements = [](const Lagrangian& l) {
    const auto b = l.basis();
    const std::uint64_t m = l.space().ring().modulus().get_ui();
    std::uint64_t combos = 1;
    for (std::size_t j = 0; j < b.cols(); ++j) combos *= m;
    std::set<std::vector<std::uint64_t>> out;
    for (std::uint64_t idx = 0; idx < combos; ++idx) {
      std::vector<std::uint64_t> v(b.rows(), 0);
      std::uint64_t t = idx;
      for (std::size_t j = 0; j < b.cols(); ++j, t /= m)
        for (std::size_t i = 0; i < b.rows(); ++i) v[i] = (v[i] + (t % m) * b.at(i, j).get_ui()) % m;
      out.insert(std::move(v));
    }
    return out;
  };
  const auto a = elements(z), b = elements(w);
  std::size_t common = 0;
  for (const auto& v : a) common += b.count(v);
  return common;
}

}  // namespace

TEST_CASE("n = 1, p = 2: corank splits evenly and T is trivial") {
  Rng rng(1);
  int corank_one = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const auto out = sample_rst(2, 1, rng);
    CHECK(out.t_invariants.trivial());
    CHECK(out.corank <= 1);
    corank_one += out.corank == 1;
  }
  CHECK(std::abs(corank_one - draws / 2) <= 150);
}

TEST_CASE("sample_rst validates the policy") {
  Rng rng(2);
  CHECK_THROWS_AS(sample_rst(2, 3, rng, PrecisionPolicy{1, 64, 4}), Error);
  CHECK_THROWS_AS(sample_rst(2, 3, rng, PrecisionPolicy{8, 4, 4}), Error);
  CHECK_THROWS_AS(sample_rst(4, 3, rng), Error);
}

TEST_CASE("property: every T has square order and paired factors") {
  Rng rng(3);
  for (std::uint64_t p : {2, 3, 5}) {
    std::uint64_t nontrivial = 0;
    for (int i = 0; i < 10000; ++i) {
      const std::size_t n = 2 + static_cast<std::size_t>(i % 7);
      const auto out = sample_rst(p, n, rng);
      REQUIRE(out.t_invariants.factors_paired());
      REQUIRE(out.t_invariants.has_square_order());
      nontrivial += !out.t_invariants.trivial();
    }
    CHECK(nontrivial > 0);
  }
}

TEST_CASE("property: corank law for n >= 6") {
  Rng rng(4);
  for (std::uint64_t p : {2, 3}) {
    for (std::size_t n : {6, 7}) {
      const auto h = corank_distribution(p, n, 10000, rng);
      INFO("p=" << p << " n=" << n);
      CHECK(std::abs(h.frequency(0) - 0.5) <= 0.02);
      CHECK(std::abs(h.frequency(1) - 0.5) <= 0.02);
      CHECK(1 - h.frequency(0) - h.frequency(1) <= 0.02);
      double total = 0;
      for (const auto& [r, c] : h.counts) total += h.frequency(r);
      CHECK(total == doctest::Approx(1.0));
      CHECK(h.interval(0).lo <= h.frequency(0));
      CHECK(h.interval(0).hi >= h.frequency(0));
    }
  }
}

TEST_CASE("p = 3, n = 6: coranks 0 and 1 carry almost all mass") {
  Rng rng(5);
  const auto h = corank_distribution(3, 6, 10000, rng);
  CHECK(h.frequency(0) + h.frequency(1) >= 0.98);
}

TEST_CASE("property: raw corank >= 2 is rare and shrinks with precision") {
  Rng rng(6);
  const std::size_t n = 6;
  const QuadSpace space(RingTag::mod_prime_power(2, 2), n);
  const std::vector<unsigned> precisions{2, 4, 8, 16};
  std::vector<unsigned> high(precisions.size(), 0);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    Lagrangian z = sample_lagrangian(space, rng), w = sample_lagrangian(space, rng);
    unsigned prev = n + 1;
    for (std::size_t k = 0; k < precisions.size(); ++k) {
      z.extend(precisions[k], rng);
      w.extend(precisions[k], rng);
      const unsigned zeros = capped_zero_count(z, w);
      CHECK(zeros <= prev);
      prev = zeros;
      high[k] += zeros >= 2;
    }
  }
  for (std::size_t k = 1; k < high.size(); ++k) CHECK(high[k] <= high[k - 1]);
  CHECK(high.back() < draws / 100);
}

TEST_CASE("property: extending a stable sample never changes its outcome") {
  Rng rng(7);
  for (std::uint64_t p : {2, 3}) {
    const QuadSpace space(RingTag::mod_prime_power(p, 8), 5);
    for (int i = 0; i < 2000; ++i) {
      Lagrangian z = sample_lagrangian(space, rng), w = sample_lagrangian(space, rng);
      const auto before = padic_report(intersection_valuations(z, w), 5, 8, kDefaultPrecisionMargin);
      if (needs_escalation(before)) continue;
      z.extend(40, rng);
      w.extend(40, rng);
      const auto after = padic_report(intersection_valuations(z, w), 5, 40, kDefaultPrecisionMargin);
      CHECK(after.rank_zero_divisors == before.rank_zero_divisors);
      CHECK(after.valuations == before.valuations);
    }
  }
}

TEST_CASE("property: T order matches brute-force intersections") {
  Rng rng(8);
  for (std::uint64_t p : {2, 3}) {
    for (std::size_t n : {1, 2}) {
      const unsigned e = 3;
      const QuadSpace space(RingTag::mod_prime_power(p, e), n);
      for (int i = 0; i < 60; ++i) {
        const Lagrangian z = sample_lagrangian(space, rng), w = sample_lagrangian(space, rng);
        const auto report = padic_report(intersection_valuations(z, w), n, e, 1);
        if (needs_escalation(report)) continue;
        const auto out = rst_from_report(p, n, report);
        mpz_class expected = out.t_invariants.order();
        for (unsigned k = 0; k < out.corank * e; ++k) expected *= p;
        CHECK(mpz_class(static_cast<unsigned long>(brute_intersection(z, w))) == expected);
      }
    }
  }
}

TEST_CASE("sample_t_conditioned") {
  Rng rng(9);
  for (int i = 0; i < 200; ++i) CHECK(sample_t_conditioned(2, 1, 1, rng).trivial());
  for (int i = 0; i < 2000; ++i) CHECK(sample_t_conditioned(3, 5, 0, rng).has_square_order());
  CHECK_THROWS_AS(sample_t_conditioned(2, 2, 2, rng, PrecisionPolicy{4, 16, 2}, 50), RejectionBudgetExceeded);
  CHECK_THROWS_AS(sample_t_conditioned(2, 2, 3, rng), Error);
}
