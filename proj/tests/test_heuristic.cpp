#include <cmath>

#include "doctest.h"
#include "selmerlab/core/error.hpp"
#include "selmerlab/heuristic/heuristic.hpp"

using namespace selmerlab;

namespace {

std::vector<double> log_grid(double lo_exp, double hi_exp, int points) {
  std::vector<double> g;
  for (int i = 0; i < points; ++i) g.push_back(std::pow(10.0, lo_exp + (hi_exp - lo_exp) * i / (points - 1)));
  return g;
}

ExponentFit rank_slope(const RankCountSeries& s, unsigned r) {
  std::vector<double> xs;
  std::vector<std::uint64_t> hits, totals;
  for (const auto& row : s.rows) {
    xs.push_back(row.cal.H);
    hits.push_back(row.ge[r]);
    totals.push_back(row.total);
  }
  return fit_proportions(xs, hits, totals);
}

}  // namespace

TEST_CASE("calibration") {
  for (double H : log_grid(6, 40, 30)) {
    const auto cal = calibrate(H);
    CHECK(cal.X >= 2);
    CHECK(cal.eta >= 1);
    const double ratio = std::pow(static_cast<double>(cal.X), cal.eta) / std::pow(H, 1.0 / 12);
    CHECK(ratio >= 0.5);
    CHECK(ratio <= 2);
  }
  const auto cal = calibrate(1e12, 1.0 / 12, 1.0);
  CHECK(cal.X == 2);  // round(10^(1/5.257))
  CHECK(std::pow(2.0, cal.eta) == doctest::Approx(std::pow(1e12, 1.0 / 12)));
  CHECK_THROWS_AS(calibrate(1e12, 0.0), DegenerateCalibration);
  CHECK_THROWS_AS(calibrate(1e6, 1.0 / 12, 1.0), DegenerateCalibration);
  CHECK_THROWS_AS(calibrate(8), Error);
}

TEST_CASE("simulate_curve") {
  Rng rng(1);
  const auto cal = calibrate(1e12);
  int sizes[2] = {0, 0};
  for (int i = 0; i < 5000; ++i) {
    const auto sim = simulate_curve(cal, rng);
    REQUIRE((sim.n == cal.n_lo() || sim.n == cal.n_lo() + 1));
    ++sizes[sim.n - cal.n_lo()];
    CHECK(sim.sample.pseudo_rank % 2 == sim.n % 2);
    CHECK((sim.sha0 == 0) == (sim.sample.pseudo_rank > 0));
    if (sim.sha0 != 0) CHECK(is_perfect_square(sim.sha0));
  }
  CHECK(sizes[0] > 2300);
  CHECK(sizes[1] > 2300);
}

TEST_CASE("fit_exponent") {
  std::vector<SeriesPoint> pts;
  for (double H : log_grid(6, 12, 5)) pts.push_back({H, std::pow(H, -1.0 / 12), 0});
  CHECK(fit_exponent(pts).slope == doctest::Approx(-1.0 / 12).epsilon(1e-9));
  for (auto& p : pts) p.y = 3;
  CHECK(std::abs(fit_exponent(pts).slope) < 1e-12);
  pts.resize(2);
  CHECK_THROWS_AS(fit_exponent(pts), Error);
  const std::vector<double> xs{1, 2, 3};
  const std::vector<std::uint64_t> hits{5, 0, 2}, trials{10, 10, 10};
  CHECK_THROWS_AS(fit_proportions(xs, hits, trials), AllZeroSeries);
  // Weighted fit leans on the low-variance points.
  const std::vector<SeriesPoint> w{{1, 1, 1e-6}, {2, 0.5, 1e-6}, {4, 10, 100}};
  CHECK(fit_exponent(w).slope < -0.5);
}

TEST_CASE("height scan: counts, rank split, and exponent ladder") {
  const auto grid = log_grid(6, 12, 5);
  const auto s = height_scan(grid, 100000, 2024);
  double prev_p2 = 1;
  for (const auto& row : s.rows) {
    CHECK(row.ge[0] == row.total);
    for (std::size_t r = 1; r < row.ge.size(); ++r) CHECK(row.ge[r] <= row.ge[r - 1]);
    CHECK(row.count_r1 <= row.ge[1]);
    CHECK(std::abs(static_cast<double>(row.count_r1) / static_cast<double>(row.total) - 0.5) <= 0.02);
    prev_p2 = std::min(prev_p2, row.prob_ge(2).estimate);
  }
  CHECK(s.rows.back().prob_ge(2).estimate < s.rows.front().prob_ge(2).estimate);
  const auto f2 = rank_slope(s, 2), f3 = rank_slope(s, 3);
  INFO("slope2*24=" << f2.slope * 24 << " slope3*24=" << f3.slope * 24);
  CHECK(f2.slope < 0);
  CHECK(f3.slope < f2.slope);
  CHECK(f2.slope * 24 >= -1.5);
  CHECK(f2.slope * 24 <= -0.5);
  CHECK(f3.slope * 24 >= -3.0);
  CHECK(f3.slope * 24 <= -1.0);
}

TEST_CASE("property: rank 0/1 split once X^n is not tiny") {
  // At H <= 10^12 the calibrated X^eta is at most 10 and Prob(rk >= 2)
  // reaches 0.1, so the split is checked further out.
  const auto s = height_scan({1e20, 1e30, 1e40}, 10000, 5);
  for (const auto& row : s.rows) {
    INFO("H=" << row.cal.H);
    for (auto c : {row.count_r0, row.count_r1}) {
      const double q = static_cast<double>(c) / static_cast<double>(row.total);
      CHECK(q >= 0.45);
      CHECK(q <= 0.55);
    }
  }
}

TEST_CASE("property: height scan is deterministic across job counts") {
  const auto grid = log_grid(6, 12, 3);
  ScanOptions one, four;
  four.jobs = 4;
  const auto a = height_scan(grid, 3000, 77, one), b = height_scan(grid, 3000, 77, four);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].ge == b.rows[i].ge);
    CHECK(a.rows[i].sha0.mean == b.rows[i].sha0.mean);
    CHECK(a.rows[i].sha0.se == b.rows[i].sha0.se);
  }
  ScanOptions prop;
  prop.mode = CountMode::Proportional;
  const auto c = height_scan({1e6, 1e7}, 100, 1, prop);
  CHECK(c.rows[0].total == 100);
  CHECK(c.rows[1].total == static_cast<std::uint64_t>(std::llround(100 * std::pow(10.0, 5.0 / 6))));
  CHECK_THROWS_AS(height_scan({1e7, 1e6}, 10, 1), Error);
}

TEST_CASE("average_sha0") {
  // Heights whose smaller matrix size is at least 3; with n in {2, 3} the
  // rank-0 curves are all 2 x 2 and the mean sits near 2.
  for (double H : {1e8, 1e12, 1e15, 1e20}) {
    const auto a = average_sha0(H, 100000, 3);
    INFO("H=" << H << " n_lo=" << a.cal.n_lo() << " ratio*24=" << a.log_ratio * 24);
    REQUIRE(a.cal.n_lo() >= 3);
    CHECK(a.all_squares);
    CHECK(a.plain_mean.mean >= a.rank0_fraction);
    CHECK(a.log_ratio >= 1.0 / 24);
    CHECK(a.log_ratio <= 3.0 / 24);
  }
}
