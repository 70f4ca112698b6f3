#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>

#include "configs.hpp"
#include "oracles.hpp"
#include "selmerlab/altmat/alt_matrix.hpp"
#include "selmerlab/census/census.hpp"
#include "selmerlab/core/error.hpp"
#include "selmerlab/core/parallel.hpp"
#include "selmerlab/core/rng.hpp"
#include "selmerlab/core/stats.hpp"
#include "selmerlab/heuristic/heuristic.hpp"
#include "selmerlab/predictions/predictions.hpp"
#include "selmerlab/quadratic/lagrangian.hpp"
#include "selmerlab/rst/rst.hpp"

#ifndef SELMERLAB_VERSION
#define SELMERLAB_VERSION "unknown"
#endif

namespace selmerlab {

using detail::key_number;
using detail::num;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t task_seed(std::uint64_t seed, const std::string& label) { return mix64(seed, hash_string(label)); }

std::string u64(std::uint64_t x) { return std::to_string(x); }

double to_double(const Decimal& d) { return d.convert_to<double>(); }

double fraction(std::uint64_t k, std::uint64_t n) { return n ? static_cast<double>(k) / static_cast<double>(n) : kNaN; }

void run_census(const ExperimentSpec& spec, ResultTable& t) {
  const auto cfg = detail::parse_census(spec.params);
  const double c = to_double(census_constant());
  t.columns = {"H", "count", "normalized", "constant_ref", "ratio"};
  for (auto H : cfg.heights) {
    const auto rec = count_curves(H, spec.parallelism);
    const double ratio = rec.normalized / c;
    t.rows.push_back({u64(H), u64(rec.count), num(rec.normalized), num(c), num(ratio)});
    t.summary["count@" + u64(H)] = static_cast<double>(rec.count);
    t.summary["ratio@" + u64(H)] = ratio;
  }
}

void run_selmer_dist(const ExperimentSpec& spec, ResultTable& t) {
  const auto cfg = detail::parse_selmer_dist(spec.params);
  t.columns = {"p", "n", "dim", "count", "frequency", "oracle"};
  double max_tv = 0;
  for (auto p : cfg.primes) {
    const QuadSpace space(RingTag::prime_field(p), cfg.n);
    const std::uint64_t seed = task_seed(spec.seed, "selmer-dist/p=" + u64(p));
    std::vector<unsigned> dims(cfg.samples);
    parallel_for(cfg.samples, spec.parallelism, [&](std::uint64_t i) {
      Rng rng = Rng::substream(seed, i);
      const auto z = sample_lagrangian(space, rng), w = sample_lagrangian(space, rng);
      const auto v = intersection_valuations(z, w);
      dims[i] = static_cast<unsigned>(std::count(v.begin(), v.end(), 1u));
    });
    Histogram<unsigned> hist;
    for (auto d : dims) ++hist[d];
    const auto table = density_table(p, static_cast<unsigned>(cfg.n));
    std::map<unsigned, double> oracle;
    for (unsigned s = 0; s < table.entries.size(); ++s) oracle[s] = to_double(table.entries[s]);
    const unsigned top = std::max(hist.rbegin()->first, [&] {
      unsigned s = 0;
      while (s + 1 < table.entries.size() && oracle[s + 1] > 1e-9) ++s;
      return s;
    }());
    for (unsigned d = 0; d <= top; ++d) {
      const auto it = hist.find(d);
      const std::uint64_t k = it == hist.end() ? 0 : it->second;
      t.rows.push_back({u64(p), u64(cfg.n), u64(d), u64(k), num(fraction(k, cfg.samples)), num(oracle[d])});
    }
    const double tv = total_variation(hist, oracle);
    t.summary["tv@p=" + u64(p)] = tv;
    max_tv = std::max(max_tv, tv);
  }
  t.summary["max_tv"] = max_tv;
}

void run_selmer_avg(const ExperimentSpec& spec, ResultTable& t) {
  const auto cfg = detail::parse_selmer_avg(spec.params);
  t.columns = {"m", "p", "e", "n", "samples", "mean", "se", "sigma", "rel_err"};
  double worst = 0;
  for (auto [p, e] : cfg.moduli) {
    std::uint64_t m = 1;
    for (unsigned i = 0; i < e; ++i) m *= p;
    const QuadSpace space(e == 1 ? RingTag::prime_field(p) : RingTag::mod_prime_power(p, e), cfg.n);
    const std::uint64_t seed = task_seed(spec.seed, "selmer-avg/m=" + u64(m));
    std::vector<double> orders(cfg.samples);
    parallel_for(cfg.samples, spec.parallelism, [&](std::uint64_t i) {
      Rng rng = Rng::substream(seed, i);
      const auto z = sample_lagrangian(space, rng), w = sample_lagrangian(space, rng);
      unsigned s = 0;
      for (unsigned v : intersection_valuations(z, w)) s += v;
      orders[i] = std::pow(static_cast<double>(p), s);
    });
    const auto mean = sample_mean(orders);
    const double target = sigma(m).get_d();
    const double rel = std::abs(mean.mean / target - 1);
    t.rows.push_back({u64(m), u64(p), u64(e), u64(cfg.n), u64(cfg.samples), num(mean.mean), num(mean.se),
                      num(target), num(rel)});
    t.summary["mean@m=" + u64(m)] = mean.mean;
    t.summary["rel_err@m=" + u64(m)] = rel;
    worst = std::max(worst, rel);
  }
  t.summary["max_rel_err"] = worst;
}

struct Draw {
  unsigned rank = 0;
  bool square = false;
  bool ceiling = false;
};

void add_rank_row(ResultTable& t, const std::string& source, std::uint64_t p, std::size_t n,
                  const std::vector<Draw>& draws, double& square_min) {
  std::uint64_t done = 0, ceiling = 0, r0 = 0, r1 = 0, ge2 = 0, square = 0;
  for (const auto& d : draws) {
    if (d.ceiling) {
      ++ceiling;
      continue;
    }
    ++done;
    r0 += d.rank == 0;
    r1 += d.rank == 1;
    ge2 += d.rank >= 2;
    square += d.square;
  }
  const auto i0 = wilson_interval(r0, done), i1 = wilson_interval(r1, done);
  const double sq = fraction(square, done);
  t.rows.push_back({source, u64(p), u64(n), u64(done), u64(ceiling), num(i0.estimate), num(i0.lo), num(i0.hi),
                    num(i1.estimate), num(i1.lo), num(i1.hi), num(fraction(ge2, done)), num(sq)});
  square_min = std::min(square_min, sq);
  if (source == "rst") {
    const std::string key = "@p=" + u64(p) + ",n=" + u64(n);
    t.summary["p_r0" + key] = i0.estimate;
    t.summary["p_r1" + key] = i1.estimate;
    t.summary["p_ge2" + key] = fraction(ge2, done);
    auto bump = [&](const std::string& k, double v) {
      t.summary[k] = t.summary.count(k) ? std::max(t.summary[k], v) : v;
    };
    bump("max_dev_r01", std::max(std::abs(i0.estimate - 0.5), std::abs(i1.estimate - 0.5)));
    bump("max_p_ge2", fraction(ge2, done));
    t.summary["ceiling_events"] += static_cast<double>(ceiling);
  }
}

void run_rst(const ExperimentSpec& spec, ResultTable& t) {
  const auto cfg = detail::parse_rst(spec.params);
  t.columns = {"source", "p",    "n",    "completed", "ceiling", "p_r0",          "p_r0_lo",
               "p_r0_hi", "p_r1", "p_r1_lo", "p_r1_hi", "p_ge2", "square_fraction"};
  t.summary["ceiling_events"] = 0;
  double rst_square = 1, alt_square = 1;
  for (auto p : cfg.primes) {
    for (auto n : cfg.sizes) {
      const std::uint64_t seed = task_seed(spec.seed, "rst/p=" + u64(p) + ",n=" + u64(n));
      std::vector<Draw> draws(cfg.samples);
      parallel_for(cfg.samples, spec.parallelism, [&](std::uint64_t i) {
        Rng rng = Rng::substream(seed, i);
        try {
          const auto out = sample_rst(p, n, rng, cfg.policy);
          draws[i] = {out.corank, out.t_invariants.has_square_order() && out.t_invariants.factors_paired(), false};
        } catch (const PrecisionCeiling&) {
          draws[i].ceiling = true;
        }
      });
      add_rank_row(t, "rst", p, n, draws, rst_square);
    }
    if (cfg.coker_samples == 0) continue;
    const std::uint64_t seed = task_seed(spec.seed, "rst-alt/p=" + u64(p) + ",n=" + u64(cfg.coker_n));
    std::vector<Draw> draws(cfg.coker_samples);
    parallel_for(cfg.coker_samples, spec.parallelism, [&](std::uint64_t i) {
      Rng rng = Rng::substream(seed, i);
      try {
        const auto s = sample_alt_padic_stable(cfg.coker_n, p, rng, cfg.policy);
        draws[i] = {s.pseudo_rank, s.pseudo_sha.has_square_order() && s.pseudo_sha.factors_paired(), false};
      } catch (const PrecisionCeiling&) {
        draws[i].ceiling = true;
      }
    });
    add_rank_row(t, "alt", p, cfg.coker_n, draws, alt_square);
  }
  t.summary["rst_square_fraction"] = rst_square;
  if (cfg.coker_samples > 0) t.summary["coker_square_fraction"] = alt_square;
}

void run_coker(const ExperimentSpec& spec, ResultTable& t) {
  const auto cfg = detail::parse_coker(spec.params);
  t.columns = {"r", "n", "group", "t_count", "coker_count", "t_freq", "coker_freq"};
  double max_tv = 0, square = 1;
  for (auto r : cfg.coranks) {
    const std::size_t n = r % 2 ? cfg.n_odd : cfg.n_even;
    const unsigned ru = static_cast<unsigned>(r);
    const std::uint64_t t_seed = task_seed(spec.seed, "coker-t/r=" + u64(r) + ",n=" + u64(n));
    const std::uint64_t a_seed = task_seed(spec.seed, "coker-alt/r=" + u64(r) + ",n=" + u64(n));
    std::vector<AbelianInvariants> ts(cfg.samples), as(cfg.samples);
    parallel_for(cfg.samples, spec.parallelism, [&](std::uint64_t i) {
      Rng rt = Rng::substream(t_seed, i);
      ts[i] = sample_t_conditioned(cfg.p, n, ru, rt, cfg.policy, cfg.budget);
      Rng ra = Rng::substream(a_seed, i);
      as[i] = conditioned_coker(n, cfg.p, ru, 1, ra, cfg.policy, cfg.budget).counts.begin()->first;
    });
    Histogram<AbelianInvariants> th, ah;
    std::uint64_t good = 0;
    for (std::uint64_t i = 0; i < cfg.samples; ++i) {
      ++th[ts[i]];
      ++ah[as[i]];
      good += ts[i].has_square_order() && ts[i].factors_paired() && as[i].has_square_order() && as[i].factors_paired();
    }
    square = std::min(square, fraction(good, cfg.samples));
    Histogram<AbelianInvariants> keys = th;
    for (const auto& [g, c] : ah) keys[g] += 0;
    for (const auto& [g, c] : keys) {
      const std::uint64_t tc = th.count(g) ? th[g] : 0, ac = ah.count(g) ? ah[g] : 0;
      t.rows.push_back({u64(r), u64(n), g.to_string(), u64(tc), u64(ac), num(fraction(tc, cfg.samples)),
                        num(fraction(ac, cfg.samples))});
    }
    const double tv = total_variation(th, ah);
    t.summary["tv@r=" + u64(r)] = tv;
    max_tv = std::max(max_tv, tv);
  }
  t.summary["max_tv"] = max_tv;
  t.summary["square_fraction"] = square;
}

constexpr std::uint64_t kRankBlock = 1 << 18;

void run_rank_scaling(const ExperimentSpec& spec, ResultTable& t) {
  const auto cfg = detail::parse_rank_scaling(spec.params);
  t.columns = {"n", "r", "X", "source", "hits", "trials", "prob", "lo", "hi"};
  for (const auto& s : cfg.series) {
    const std::string series = "n=" + u64(s.n) + ",r=" + u64(s.r);
    std::vector<double> xs;
    std::vector<std::uint64_t> hits, trials;
    for (std::size_t k = 0; k < s.bounds.size(); ++k) {
      const std::uint64_t X = s.bounds[k], total = s.samples[k];
      const std::uint64_t blocks = (total + kRankBlock - 1) / kRankBlock;
      const std::uint64_t seed = task_seed(spec.seed, "rank/" + series + ",X=" + u64(X));
      std::vector<RankProbability> parts(blocks);
      parallel_for(blocks, spec.parallelism, [&](std::uint64_t b) {
        Rng rng = Rng::substream(seed, b);
        parts[b] = prob_rank_ge(s.n, X, s.r, std::min(kRankBlock, total - b * kRankBlock), rng);
      });
      if (parts[0].exact) {
        t.rows.push_back({u64(s.n), u64(s.r), u64(X), "parity", "", "", num(parts[0].estimate),
                          num(parts[0].estimate), num(parts[0].estimate)});
        continue;
      }
      std::uint64_t h = 0;
      for (const auto& part : parts) h += part.hits;
      const auto ci = wilson_interval(h, total);
      t.rows.push_back(
          {u64(s.n), u64(s.r), u64(X), "sample", u64(h), u64(total), num(ci.estimate), num(ci.lo), num(ci.hi)});
      xs.push_back(static_cast<double>(X));
      hits.push_back(h);
      trials.push_back(total);
    }
    for (auto X : s.exact_bounds) {
      const auto [h, total] = exact_prob_rank_ge(s.n, X, s.r);
      const double q = fraction(h, total);
      t.rows.push_back({u64(s.n), u64(s.r), u64(X), "exact", u64(h), u64(total), num(q), num(q), num(q)});
      t.summary["exact@" + series + ",X=" + u64(X)] = q;
    }
    t.summary["predicted_slope@" + series] = -static_cast<double>(s.n) * (static_cast<double>(s.r) - 1) / 2;
    double slope = kNaN, lo = kNaN, hi = kNaN;
    if (xs.size() >= 3) {
      try {
        const auto fit = fit_proportions(xs, hits, trials);
        slope = fit.slope;
        lo = fit.lo;
        hi = fit.hi;
      } catch (const AllZeroSeries&) {
      }
    }
    t.summary["slope@" + series] = slope;
    t.summary["slope_lo@" + series] = lo;
    t.summary["slope_hi@" + series] = hi;
  }
}

void run_height_scan(const ExperimentSpec& spec, ResultTable& t) {
  auto cfg = detail::parse_height_scan(spec.params, spec.kind);
  cfg.options.jobs = spec.parallelism;
  const auto series = height_scan(cfg.heights, cfg.curves, task_seed(spec.seed, "height-scan"), cfg.options);
  t.columns = {"H", "eta", "X", "n_lo", "total", "ge1", "ge2", "ge3", "ge4", "r0", "r1", "sha0_mean", "sha0_se"};
  double split = 0;
  for (const auto& row : series.rows) {
    t.rows.push_back({key_number(row.cal.H), num(row.cal.eta), u64(row.cal.X), u64(row.cal.n_lo()), u64(row.total),
                      u64(row.ge[1]), u64(row.ge[2]), u64(row.ge[3]), u64(row.ge[4]), u64(row.count_r0),
                      u64(row.count_r1), num(row.sha0.mean), num(row.sha0.se)});
    split = std::max(split, std::abs(fraction(row.count_r1, row.total) - 0.5));
  }
  t.summary["max_r1_dev"] = split;
  for (unsigned r = 1; r <= kMaxTrackedRank; ++r) {
    std::vector<double> xs;
    std::vector<std::uint64_t> hits, trials;
    for (const auto& row : series.rows) {
      xs.push_back(row.cal.H);
      hits.push_back(row.ge[r]);
      trials.push_back(row.total);
    }
    double slope = kNaN;
    try {
      slope = fit_proportions(xs, hits, trials).slope * 24;
    } catch (const AllZeroSeries&) {
    }
    t.summary["slope24@r=" + u64(r)] = slope;
  }
  t.summary["slope_gap24"] = t.summary["slope24@r=3"] - t.summary["slope24@r=2"];
}

void run_sha_average(const ExperimentSpec& spec, ResultTable& t) {
  auto cfg = detail::parse_height_scan(spec.params, spec.kind);
  cfg.options.jobs = spec.parallelism;
  t.columns = {"H",    "n_lo", "X",         "eta",          "curves",    "mean",        "se",
               "plain_mean", "rank0_fraction", "reference", "log_ratio24", "all_squares"};
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, squares = 1;
  for (double H : cfg.heights) {
    const auto a = average_sha0(H, cfg.curves, task_seed(spec.seed, "sha/H=" + key_number(H)), cfg.options);
    t.rows.push_back({key_number(H), u64(a.cal.n_lo()), u64(a.cal.X), num(a.cal.eta), u64(cfg.curves), num(a.mean.mean),
                      num(a.mean.se), num(a.plain_mean.mean), num(a.rank0_fraction), num(a.reference),
                      num(a.log_ratio * 24), a.all_squares ? "1" : "0"});
    t.summary["log_ratio24@H=" + key_number(H)] = a.log_ratio * 24;
    lo = std::min(lo, a.log_ratio * 24);
    hi = std::max(hi, a.log_ratio * 24);
    squares = std::min(squares, a.all_squares ? 1.0 : 0.0);
  }
  t.summary["min_log_ratio24"] = lo;
  t.summary["max_log_ratio24"] = hi;
  t.summary["all_squares"] = squares;
}

void run_oracles(const ExperimentSpec& spec, ResultTable& t) {
  const auto cfg = detail::parse_oracles(spec.params);
  t.columns = {"suite", "case", "trials", "failures", "statistic", "threshold"};
  const unsigned jobs = spec.parallelism;
  const auto snf = detail::snf_failures(cfg.snf_samples, task_seed(spec.seed, "oracle/snf"), jobs);
  t.rows.push_back({"snf-reconstruction", "random up to 6x6", u64(cfg.snf_samples), u64(snf), "", ""});
  const auto coker = detail::coker_failures(cfg.coker_samples, task_seed(spec.seed, "oracle/coker"), jobs);
  t.rows.push_back({"coker-bruteforce", "3x3 in [-3,3]", u64(cfg.coker_samples), u64(coker), "", ""});
  std::uint64_t chi_fail = 0;
  if (cfg.chi_draws > 0) {
    for (const auto& c : cfg.lagrangian_cases) {
      const std::string label = u64(c[0]) + "," + u64(c[1]) + "," + u64(c[2]);
      const auto chi = detail::lagrangian_chi_square(c[0], c[1], static_cast<unsigned>(c[2]), cfg.chi_draws, cfg.alpha,
                                                     task_seed(spec.seed, "oracle/chi/" + label), jobs);
      const bool ok = chi.bins < 2 ? chi.statistic == 0 : chi.statistic < chi.critical;
      chi_fail += !ok;
      t.rows.push_back({"lagrangian-chi2", "(" + label + ") bins=" + u64(chi.bins), u64(cfg.chi_draws),
                        ok ? "0" : "1", num(chi.statistic), num(chi.critical)});
    }
  }
  double worst = 0;
  for (auto p : cfg.primes) {
    const double err = to_double(abs(mean_selmer_check(p) - Decimal(p + 1)));
    worst = std::max(worst, err);
    t.rows.push_back({"mean-selmer", "p=" + u64(p), "", "", num(err), "1e-06"});
  }
  t.summary["snf_failures"] = static_cast<double>(snf);
  t.summary["coker_failures"] = static_cast<double>(coker);
  t.summary["chi2_failures"] = static_cast<double>(chi_fail);
  t.summary["mean_selmer_max_err"] = worst;
}

void run_determinism(const ExperimentSpec& spec, ResultTable& t) {
  const auto cfg = detail::parse_determinism(spec.params);
  t.columns = {"target", "jobs", "rows", "digest"};
  double all = 1;
  for (const auto& name : cfg.targets) {
    auto target = *catalog_spec(name);
    target.seed = spec.seed;
    target.expect = Json::object();
    if (cfg.samples) override_samples(target, *cfg.samples);
    std::vector<std::string> digests;
    for (auto jobs : cfg.jobs) {
      target.parallelism = static_cast<unsigned>(jobs);
      const auto table = run_experiment(target);
      char hex[17];
      std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash_string(rows_csv(table))));
      digests.emplace_back(hex);
      t.rows.push_back({name, u64(jobs), u64(table.rows.size()), hex});
    }
    const bool same = std::all_of(digests.begin(), digests.end(), [&](const auto& d) { return d == digests[0]; });
    t.summary["identical@" + name] = same ? 1 : 0;
    if (!same) all = 0;
  }
  t.summary["identical"] = all;
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

CheckResult evaluate(const std::string& metric, const Json& rule, const std::map<std::string, double>& summary) {
  CheckResult c;
  c.metric = metric;
  const auto it = summary.find(metric);
  c.value = it == summary.end() ? kNaN : it->second;
  const double v = c.value;
  if (rule.contains("value")) {
    const double target = rule["value"].get<double>();
    const double tol = rule.contains("tol") ? rule["tol"].get<double>() : rule["rel_tol"].get<double>() * std::abs(target);
    c.rule = "|x - " + num(target) + "| <= " + num(tol);
    c.passed = std::abs(v - target) <= tol;
  } else {
    const bool strict = rule.value("strict", false);
    const double lo = rule.contains("min") ? rule["min"].get<double>() : -std::numeric_limits<double>::infinity();
    const double hi = rule.contains("max") ? rule["max"].get<double>() : std::numeric_limits<double>::infinity();
    const char* op = strict ? " < " : " <= ";
    c.rule = num(lo) + op + "x" + op + num(hi);
    c.passed = strict ? (v > lo && v < hi) : (v >= lo && v <= hi);
  }
  if (it == summary.end()) c.rule += " (metric not produced)";
  return c;
}

}  // namespace

bool ResultTable::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

ResultTable run_experiment(const ExperimentSpec& spec) {
  validate_spec(spec);
  ResultTable t;
  t.metadata = {{"name", spec.name},
                {"kind", spec.kind},
                {"spec", spec_to_json(spec).dump()},
                {"version", "selmerlab " SELMERLAB_VERSION},
                {"rng", std::string(kRngName)},
                {"timestamp", utc_now()}};
  const std::string& k = spec.kind;
  if (k == "census") {
    run_census(spec, t);
  } else if (k == "selmer-dist") {
    run_selmer_dist(spec, t);
  } else if (k == "selmer-avg") {
    run_selmer_avg(spec, t);
  } else if (k == "rst") {
    run_rst(spec, t);
  } else if (k == "coker") {
    run_coker(spec, t);
  } else if (k == "rank-scaling") {
    run_rank_scaling(spec, t);
  } else if (k == "height-scan") {
    run_height_scan(spec, t);
  } else if (k == "sha-average") {
    run_sha_average(spec, t);
  } else if (k == "oracles") {
    run_oracles(spec, t);
  } else {
    run_determinism(spec, t);
  }
  for (const auto& [metric, rule] : spec.expect.items()) t.checks.push_back(evaluate(metric, rule, t.summary));
  return t;
}

}  // namespace selmerlab
