#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "selmerlab/altmat/alt_matrix.hpp"
#include "selmerlab/core/rng.hpp"
#include "selmerlab/core/stats.hpp"

namespace selmerlab {

inline constexpr double kDefaultShaExponent = 1.0 / 12;
inline constexpr double kDefaultEtaScale = 0.4;

/// eta(H) and X(H) with X^eta = H^exponent.
struct Calibration {
  double H = 0;
  double eta = 0;
  std::uint64_t X = 0;
  double exponent = kDefaultShaExponent;
  /// Smaller of the two matrix sizes, ceil(eta).
  std::size_t n_lo() const;
};

/// eta0 = scale * sqrt(log H), X = round(H^(exponent / eta0)), then
/// eta = exponent * log H / log X. Throws DegenerateCalibration if X < 2
/// or eta < 1.
Calibration calibrate(double H, double exponent = kDefaultShaExponent, double scale = kDefaultEtaScale);

struct CurveSim {
  double H = 0;
  std::size_t n = 0;
  AltSample sample;
  /// #pseudo_sha when pseudo_rank = 0, else 0.
  mpz_class sha0;
};

/// n uniform on {ceil(eta), ceil(eta) + 1}, A uniform with entries in
/// [-X, X], analysed over Z.
CurveSim simulate_curve(const Calibration& cal, Rng& rng);

inline constexpr unsigned kMaxTrackedRank = 4;

struct HeightRow {
  Calibration cal;
  std::uint64_t total = 0;
  /// ge[r] = #{curves with pseudo_rank >= r}, r = 0..kMaxTrackedRank.
  std::vector<std::uint64_t> ge;
  std::uint64_t count_r0 = 0;
  std::uint64_t count_r1 = 0;
  MeanEstimate sha0;

  Proportion prob_ge(unsigned r) const;
};

struct RankCountSeries {
  std::vector<HeightRow> rows;
};

enum class CountMode {
  /// curves_per_H curves at every H.
  Fixed,
  /// curves_per_H * (H / H_0)^(5/6), H_0 the first grid point.
  Proportional,
};

struct ScanOptions {
  double eta_scale = kDefaultEtaScale;
  double exponent = kDefaultShaExponent;
  CountMode mode = CountMode::Fixed;
  unsigned jobs = 1;
};

/// Simulates each grid point. Curve i at grid point H draws from substream
/// mix64(bits of H, i) of `seed`, so results do not depend on `jobs`.
RankCountSeries height_scan(const std::vector<double>& grid, std::uint64_t curves_per_H, std::uint64_t seed,
                            const ScanOptions& options = {});

/// CSV columns H, eta, X, n_lo, total, count_r0, count_r1, count_ge2,
/// count_ge3, mean_sha0, se.
void write_height_csv(std::ostream& out, const RankCountSeries& series);

struct ExponentFit {
  double slope = 0;
  double intercept = 0;
  double se = 0;
  /// slope -/+ 1.96 se
  double lo = 0;
  double hi = 0;
};

/// One point of a log-log fit. variance is the variance of log y; zero
/// everywhere means an unweighted fit.
struct SeriesPoint {
  double x = 0;
  double y = 0;
  double variance = 0;
};

/// Weighted least squares of log y on log x with weights 1/variance.
/// Needs at least 3 points with x, y > 0.
ExponentFit fit_exponent(std::span<const SeriesPoint> points);

/// Log-log fit of hits/trials against x, with the delta-method variance
/// (1 - q) / hits of log q. Throws AllZeroSeries if some point has no hits.
ExponentFit fit_proportions(std::span<const double> xs, std::span<const std::uint64_t> hits,
                            std::span<const std::uint64_t> trials);

struct ShaAverage {
  Calibration cal;
  /// Median of 16 block means of sha0.
  MeanEstimate mean;
  MeanEstimate plain_mean;
  double rank0_fraction = 0;
  /// H^exponent, the target growth.
  double reference = 0;
  /// log(mean) / log(H)
  double log_ratio = 0;
  bool all_squares = true;
};

inline constexpr std::size_t kMedianOfMeansBlocks = 16;

ShaAverage average_sha0(double H, std::uint64_t curves, std::uint64_t seed, const ScanOptions& options = {});

}  // namespace selmerlab
