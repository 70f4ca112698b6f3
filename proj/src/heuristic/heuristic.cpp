#include "selmerlab/heuristic/heuristic.hpp"

#include <bit>
#include <cmath>
#include <ostream>

#include "selmerlab/core/error.hpp"
#include "selmerlab/core/parallel.hpp"

namespace selmerlab {

std::size_t Calibration::n_lo() const { return static_cast<std::size_t>(std::ceil(eta)); }

Calibration calibrate(double H, double exponent, double scale) {
  if (!(H >= 16)) throw Error("calibration needs H >= 16");
  if (!(scale > 0)) throw Error("eta scale must be positive");
  const double log_h = std::log(H);
  const double eta0 = scale * std::sqrt(log_h);
  const double x = std::round(std::exp(exponent * log_h / eta0));
  if (!(x >= 2)) {
    throw DegenerateCalibration("X(H) rounds to " + std::to_string(static_cast<long long>(x)) + " at H = " +
                                std::to_string(H));
  }
  Calibration cal;
  cal.H = H;
  cal.X = static_cast<std::uint64_t>(x);
  cal.exponent = exponent;
  cal.eta = exponent * log_h / std::log(x);
  if (cal.eta < 1) throw DegenerateCalibration("eta(H) < 1 at H = " + std::to_string(H));
  return cal;
}

CurveSim simulate_curve(const Calibration& cal, Rng& rng) {
  const std::size_t n = cal.n_lo() + (rng.coin() ? 1 : 0);
  AltSample sample = analyze(sample_alt_bounded(n, cal.X, rng));
  mpz_class sha0 = sample.pseudo_rank == 0 ? sample.pseudo_sha.order() : mpz_class(0);
  return CurveSim{cal.H, n, std::move(sample), std::move(sha0)};
}

Proportion HeightRow::prob_ge(unsigned r) const { return wilson_interval(r < ge.size() ? ge[r] : 0, total); }

namespace {

struct CurveSummary {
  unsigned rank = 0;
  double sha0 = 0;
  bool square = true;
};

std::uint64_t curve_stream(double H, std::uint64_t index) { return mix64(std::bit_cast<std::uint64_t>(H), index); }

std::vector<CurveSummary> simulate_many(const Calibration& cal, std::uint64_t curves, std::uint64_t seed,
                                        unsigned jobs) {
  std::vector<CurveSummary> out(curves);
  parallel_for(curves, jobs, [&](std::uint64_t i) {
    Rng rng = Rng::substream(seed, curve_stream(cal.H, i));
    const CurveSim sim = simulate_curve(cal, rng);
    out[i].rank = sim.sample.pseudo_rank;
    out[i].sha0 = sim.sha0.get_d();
    out[i].square = sim.sha0 == 0 || is_perfect_square(sim.sha0);
  });
  return out;
}

}  // namespace

RankCountSeries height_scan(const std::vector<double>& grid, std::uint64_t curves_per_H, std::uint64_t seed,
                            const ScanOptions& options) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw Error("height grid must be strictly increasing");
  if (curves_per_H < 1) throw Error("height_scan needs at least one curve per height");
  RankCountSeries series;
  for (double H : grid) {
    HeightRow row;
    row.cal = calibrate(H, options.exponent, options.eta_scale);
    std::uint64_t curves = curves_per_H;
    if (options.mode == CountMode::Proportional) {
      curves = static_cast<std::uint64_t>(
          std::llround(static_cast<double>(curves_per_H) * std::pow(H / grid.front(), 5.0 / 6.0)));
    }
    const auto sims = simulate_many(row.cal, curves, seed, options.jobs);
    row.total = curves;
    row.ge.assign(kMaxTrackedRank + 1, 0);
    std::vector<double> sha;
    sha.reserve(curves);
    for (const auto& s : sims) {
      for (unsigned r = 0; r <= kMaxTrackedRank && r <= s.rank; ++r) ++row.ge[r];
      row.count_r0 += s.rank == 0;
      row.count_r1 += s.rank == 1;
      sha.push_back(s.sha0);
    }
    row.sha0 = sample_mean(sha);
    series.rows.push_back(std::move(row));
  }
  return series;
}

void write_height_csv(std::ostream& out, const RankCountSeries& series) {
  out << "H,eta,X,n_lo,total,count_r0,count_r1,count_ge2,count_ge3,mean_sha0,se\n";
  out.precision(10);
  for (const auto& r : series.rows) {
    out << r.cal.H << ',' << r.cal.eta << ',' << r.cal.X << ',' << r.cal.n_lo() << ',' << r.total << ','
        << r.count_r0 << ',' << r.count_r1 << ',' << r.ge[2] << ',' << r.ge[3] << ',' << r.sha0.mean << ','
        << r.sha0.se << '\n';
  }
}

ExponentFit fit_exponent(std::span<const SeriesPoint> points) {
  if (points.size() < 3) throw Error("fit_exponent needs at least 3 points");
  bool weighted = false;
  for (const auto& pt : points) {
    if (!(pt.x > 0) || !(pt.y > 0)) throw Error("fit_exponent needs positive values");
    weighted = weighted || pt.variance > 0;
  }
  std::vector<double> lx, ly, w;
  for (const auto& pt : points) {
    lx.push_back(std::log(pt.x));
    ly.push_back(std::log(pt.y));
    if (weighted && !(pt.variance > 0)) throw Error("weighted fit needs a positive variance at every point");
    w.push_back(weighted ? 1 / pt.variance : 1.0);
  }
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sw += w[i];
    sx += w[i] * lx[i];
    sy += w[i] * ly[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += w[i] * (lx[i] - mx) * (lx[i] - mx);
    sxy += w[i] * (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0)) throw Error("fit_exponent needs distinct x values");
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (weighted) {
    fit.se = std::sqrt(1 / sxx);
  } else {
    double rss = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      const double r = ly[i] - fit.intercept - fit.slope * lx[i];
      rss += r * r;
    }
    fit.se = std::sqrt(rss / static_cast<double>(lx.size() - 2) / sxx);
  }
  fit.lo = fit.slope - kZ95 * fit.se;
  fit.hi = fit.slope + kZ95 * fit.se;
  return fit;
}

ExponentFit fit_proportions(std::span<const double> xs, std::span<const std::uint64_t> hits,
                            std::span<const std::uint64_t> trials) {
  if (xs.size() != hits.size() || xs.size() != trials.size()) throw DimensionMismatch("series lengths differ");
  std::vector<SeriesPoint> pts;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (hits[i] == 0) {
      throw AllZeroSeries("no successes at x = " + std::to_string(xs[i]));
    }
    const double q = static_cast<double>(hits[i]) / static_cast<double>(trials[i]);
    const double var = hits[i] == trials[i] ? 1.0 / static_cast<double>(trials[i])
                                            : (1 - q) / static_cast<double>(hits[i]);
    pts.push_back(SeriesPoint{xs[i], q, var});
  }
  return fit_exponent(pts);
}

ShaAverage average_sha0(double H, std::uint64_t curves, std::uint64_t seed, const ScanOptions& options) {
  if (curves < kMedianOfMeansBlocks) throw Error("average_sha0 needs at least 16 curves");
  ShaAverage out;
  out.cal = calibrate(H, options.exponent, options.eta_scale);
  const auto sims = simulate_many(out.cal, curves, seed, options.jobs);
  std::vector<double> sha;
  sha.reserve(curves);
  std::uint64_t rank0 = 0;
  for (const auto& s : sims) {
    sha.push_back(s.sha0);
    rank0 += s.rank == 0;
    out.all_squares = out.all_squares && s.square;
  }
  out.mean = median_of_means(sha, kMedianOfMeansBlocks);
  out.plain_mean = sample_mean(sha);
  out.rank0_fraction = static_cast<double>(rank0) / static_cast<double>(curves);
  out.reference = std::pow(H, options.exponent);
  out.log_ratio = std::log(out.mean.mean) / std::log(H);
  return out;
}

}  // namespace selmerlab
