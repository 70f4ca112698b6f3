#include <cmath>

#include "selmerlab/experiment/experiment.hpp"

namespace selmerlab {
namespace {

ExperimentSpec make(std::string name, std::string kind, Json params, std::uint64_t seed, Json expect) {
  ExperimentSpec s;
  s.name = name;
  s.kind = std::move(kind);
  s.params = std::move(params);
  s.seed = seed;
  s.output = std::move(name);
  s.expect = std::move(expect);
  return s;
}

Json within(double value, double tol) { return {{"value", value}, {"tol", tol}}; }
Json range(double lo, double hi) { return {{"min", lo}, {"max", hi}}; }
Json at_most(double hi) { return {{"max", hi}}; }

// Equal expected event counts at every X: the (2X+1)^-3 law times `events`.
Json equal_event_samples(const std::vector<std::uint64_t>& xs, double events) {
  Json out = Json::array();
  for (auto x : xs) out.push_back(static_cast<std::uint64_t>(events * std::pow(2.0 * static_cast<double>(x) + 1, 3)));
  return out;
}

std::vector<CatalogEntry> build() {
  std::vector<CatalogEntry> c;
  c.push_back({"acc-census-1e10", "curve census up to H = 1e10 against the leading constant; exact count at H = 100",
               "seconds",
               make("acc-census-1e10", "census", {{"H", {100, 10000000000ULL}}}, 101,
                    {{"count@100", within(14, 0)}, {"ratio@10000000000", within(1, 0.02)}})});
  c.push_back({"acc-selmer-dist", "intersection dimension of two Lagrangians over F_p, n = 10, vs the limiting law",
               "under a minute",
               make("acc-selmer-dist", "selmer-dist", {{"p", {2, 3, 5}}, {"n", 10}, {"samples", 100000}}, 102,
                    {{"max_tv", at_most(0.02)}})});
  c.push_back({"acc-selmer-avg", "mean intersection order over Z/m, n = 20, vs sigma(m)", "several minutes",
               make("acc-selmer-avg", "selmer-avg", {{"m", {2, 3, 4, 5, 8, 9}}, {"n", 20}, {"samples", 100000}}, 103,
                    {{"max_rel_err", at_most(0.05)}})});
  c.push_back({"acc-corank", "corank of R for p in {2,3}, n in {6,7,8}", "under a minute",
               make("acc-corank", "rst", {{"p", {2, 3}}, {"n", {6, 7, 8}}, {"samples", 10000}}, 104,
                    {{"max_dev_r01", at_most(0.02)}, {"max_p_ge2", at_most(0.02)}})});
  c.push_back({"acc-square-order", "square order and paired factors of T and of alternating cokernels",
               "under a minute",
               make("acc-square-order", "rst",
                    {{"p", {2, 3}}, {"n", {8, 9}}, {"samples", 2500}, {"coker_samples", 5000}, {"coker_n", 8}}, 105,
                    {{"rst_square_fraction", within(1, 0)}, {"coker_square_fraction", within(1, 0)}})});
  c.push_back({"acc-model-equivalence", "T conditioned on corank r vs alternating cokernel conditioned on rank r, p = 2",
               "a few minutes",
               make("acc-model-equivalence", "coker",
                    {{"p", 2}, {"r", {0, 1}}, {"n_even", 8}, {"n_odd", 9}, {"samples", 10000}}, 106,
                    {{"max_tv", at_most(0.05)}})});
  const std::vector<std::uint64_t> x3{2, 4, 8, 16, 32};
  c.push_back({"acc-rank-scaling", "Prob(rk ker A >= 3) vs entry bound X for n = 3 and n = 5", "about a minute",
               make("acc-rank-scaling", "rank-scaling",
                    {{"series",
                      {{{"n", 3}, {"r", 3}, {"X", x3}, {"samples", equal_event_samples(x3, 2000)}, {"exact_X", {2}}},
                       {{"n", 5}, {"r", 3}, {"X", {2, 3, 4, 6, 8}}, {"samples", 1000000}}}}},
                    107,
                    {{"slope@n=3,r=3", within(-3, 0.3)},
                     {"exact@n=3,r=3,X=2", within(1.0 / 125, 1e-15)},
                     {"slope@n=5,r=3", within(-5, 1.0)}})});
  c.push_back({"acc-rank-exponent-r2", "rank >= 2 and >= 3 frequencies of simulated curves over H in [1e6, 1e12]",
               "seconds",
               make("acc-rank-exponent-r2", "height-scan",
                    {{"H", {1e6, std::pow(10.0, 7.5), 1e9, std::pow(10.0, 10.5), 1e12}}, {"curves", 100000}}, 108,
                    {{"slope24@r=2", range(-1.5, -0.5)}, {"slope_gap24", {{"max", 0}, {"strict", true}}}})});
  c.push_back({"acc-oracles", "SNF reconstruction, cokernel brute force, sampler chi-square, mean Selmer identity",
               "under a minute",
               make("acc-oracles", "oracles",
                    {{"snf_samples", 10000},
                     {"coker_samples", 10000},
                     {"chi_draws", 100000},
                     {"alpha", 1e-3},
                     {"lagrangian_cases", {{2, 1, 1}, {2, 2, 1}, {3, 1, 1}, {2, 1, 2}}},
                     {"mean_primes", {2, 3, 5, 7}}},
                    109,
                    {{"snf_failures", within(0, 0)},
                     {"coker_failures", within(0, 0)},
                     {"chi2_failures", within(0, 0)},
                     {"mean_selmer_max_err", at_most(1e-6)}})});
  c.push_back({"acc-determinism", "every acc-* experiment at a reduced budget, run with 1 and 4 workers",
               "under a minute",
               make("acc-determinism", "determinism",
                    {{"targets",
                      {"acc-census-1e10", "acc-selmer-dist", "acc-selmer-avg", "acc-corank", "acc-square-order",
                       "acc-model-equivalence", "acc-rank-scaling", "acc-rank-exponent-r2", "acc-oracles"}},
                     {"jobs", {1, 4}},
                     {"samples", 500}},
                    110, {{"identical", within(1, 0)}})});
  c.push_back({"demo-sha-average", "average pseudo-Sha of rank-0 simulated curves against H^(1/12)", "seconds",
               make("demo-sha-average", "sha-average", {{"H", {1e8, 1e12, 1e15, 1e20}}, {"curves", 100000}}, 111,
                    {{"all_squares", within(1, 0)}})});
  c.push_back({"demo-census", "small census grid", "instant",
               make("demo-census", "census", {{"H", {100, 1000000, 100000000}}}, 112, {{"count@100", within(14, 0)}})});
  return c;
}

}  // namespace

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = build();
  return entries;
}

std::optional<ExperimentSpec> catalog_spec(const std::string& name) {
  for (const auto& e : catalog())
    if (e.name == name) return e.spec;
  return std::nullopt;
}

}  // namespace selmerlab
