#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "configs.hpp"
#include "selmerlab/core/error.hpp"
#include "selmerlab/linalg/ring.hpp"

namespace selmerlab {
namespace detail {

Params::Params(const Json& params, std::string kind) : params_(params), kind_(std::move(kind)) {
  if (!params_.is_object()) throw InvalidSpec(kind_ + ": params must be an object");
}

void Params::fail(const std::string& key, const std::string& what) const {
  throw InvalidSpec(kind_ + ": params." + key + " " + what);
}

bool Params::has(const std::string& key) const { return params_.contains(key); }

std::uint64_t json_count(const Json& v, const std::string& where) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    const auto x = v.get<std::int64_t>();
    if (x < 0) throw InvalidSpec(where + " must be nonnegative");
    return static_cast<std::uint64_t>(x);
  }
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (x < 0 || x >= 1.8e19 || std::floor(x) != x) throw InvalidSpec(where + " must be a nonnegative integer");
    return static_cast<std::uint64_t>(x);
  }
  throw InvalidSpec(where + " must be a number");
}

std::uint64_t Params::count(const std::string& key, std::optional<std::uint64_t> fallback, std::uint64_t lo,
                            std::uint64_t hi) {
  used_.insert(key);
  if (!has(key)) {
    if (!fallback) fail(key, "is required");
    return *fallback;
  }
  const std::uint64_t v = json_count(params_.at(key), kind_ + ": params." + key);
  if (v < lo || v > hi) fail(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return v;
}

double Params::real(const std::string& key, std::optional<double> fallback) {
  used_.insert(key);
  if (!has(key)) {
    if (!fallback) fail(key, "is required");
    return *fallback;
  }
  const Json& v = params_.at(key);
  if (!v.is_number() || !std::isfinite(v.get<double>())) fail(key, "must be a finite number");
  return v.get<double>();
}

std::vector<std::uint64_t> Params::counts(const std::string& key, std::optional<std::vector<std::uint64_t>> fallback,
                                          std::uint64_t lo, std::uint64_t hi) {
  used_.insert(key);
  if (!has(key)) {
    if (!fallback) fail(key, "is required");
    return *fallback;
  }
  const Json& v = params_.at(key);
  std::vector<std::uint64_t> out;
  if (v.is_array()) {
    if (v.empty()) fail(key, "must not be empty");
    for (const auto& x : v) out.push_back(json_count(x, kind_ + ": params." + key));
  } else {
    out.push_back(json_count(v, kind_ + ": params." + key));
  }
  for (auto x : out)
    if (x < lo || x > hi) fail(key, "entries must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return out;
}

std::vector<double> Params::reals(const std::string& key) {
  used_.insert(key);
  if (!has(key)) fail(key, "is required");
  const Json& v = params_.at(key);
  std::vector<double> out;
  auto take = [&](const Json& x) {
    if (!x.is_number() || !std::isfinite(x.get<double>())) fail(key, "entries must be finite numbers");
    out.push_back(x.get<double>());
  };
  if (v.is_array()) {
    if (v.empty()) fail(key, "must not be empty");
    for (const auto& x : v) take(x);
  } else {
    take(v);
  }
  return out;
}

std::string Params::text(const std::string& key, std::optional<std::string> fallback) {
  used_.insert(key);
  if (!has(key)) {
    if (!fallback) fail(key, "is required");
    return *fallback;
  }
  if (!params_.at(key).is_string()) fail(key, "must be a string");
  return params_.at(key).get<std::string>();
}

const Json& Params::raw(const std::string& key) {
  used_.insert(key);
  if (!has(key)) fail(key, "is required");
  return params_.at(key);
}

void Params::finish() const {
  for (const auto& [key, value] : params_.items())
    if (!used_.count(key)) throw InvalidSpec(kind_ + ": unknown parameter '" + key + "'");
}

namespace {

constexpr std::uint64_t kMaxSamples = 10'000'000'000ULL;

void require_primes(const std::vector<std::uint64_t>& ps, const std::string& where) {
  for (auto p : ps)
    if (!is_prime(p)) throw InvalidSpec(where + ": " + std::to_string(p) + " is not prime");
}

PrecisionPolicy read_policy(Params& in) {
  PrecisionPolicy policy;
  policy.e_init = static_cast<unsigned>(in.count("e_init", policy.e_init, 2, 4096));
  policy.e_max = static_cast<unsigned>(in.count("e_max", policy.e_max, 2, 4096));
  policy.margin = static_cast<unsigned>(in.count("margin", policy.margin, 1, 64));
  try {
    policy.validate();
  } catch (const Error& e) {
    throw InvalidSpec(e.what());
  }
  return policy;
}

}  // namespace

CensusConfig parse_census(const Json& params) {
  Params in(params, "census");
  CensusConfig c;
  // height() is exact while |A| <= 10^6 and |B| <= 10^9.
  c.heights = in.counts("H", std::nullopt, 1, 4'000'000'000'000'000'000ULL);
  in.finish();
  return c;
}

SelmerDistConfig parse_selmer_dist(const Json& params) {
  Params in(params, "selmer-dist");
  SelmerDistConfig c;
  c.primes = in.counts("p", std::vector<std::uint64_t>{2}, 2, 1'000'003);
  require_primes(c.primes, "selmer-dist");
  c.n = in.count("n", 10, 1, 500);
  c.samples = in.count("samples", 100000, 1, kMaxSamples);
  in.finish();
  return c;
}

SelmerAvgConfig parse_selmer_avg(const Json& params) {
  Params in(params, "selmer-avg");
  SelmerAvgConfig c;
  for (auto m : in.counts("m", std::vector<std::uint64_t>{2}, 2, 1ULL << 40)) {
    std::uint64_t p = 2;
    while (m % p != 0) ++p;
    unsigned e = 0;
    std::uint64_t rest = m;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    if (rest != 1) throw InvalidSpec("selmer-avg: " + std::to_string(m) + " is not a prime power");
    c.moduli.emplace_back(p, e);
  }
  c.n = in.count("n", 20, 1, 500);
  c.samples = in.count("samples", 100000, 1, kMaxSamples);
  in.finish();
  return c;
}

RstConfig parse_rst(const Json& params) {
  Params in(params, "rst");
  RstConfig c;
  c.primes = in.counts("p", std::vector<std::uint64_t>{2}, 2, 1'000'003);
  require_primes(c.primes, "rst");
  c.sizes = in.counts("n", std::vector<std::uint64_t>{6}, 1, 200);
  c.samples = in.count("samples", 10000, 1, kMaxSamples);
  c.coker_samples = in.count("coker_samples", 0, 0, kMaxSamples);
  c.coker_n = in.count("coker_n", 8, 1, 200);
  c.policy = read_policy(in);
  in.finish();
  return c;
}

CokerConfig parse_coker(const Json& params) {
  Params in(params, "coker");
  CokerConfig c;
  c.p = in.count("p", 2, 2, 1'000'003);
  require_primes({c.p}, "coker");
  c.coranks = in.counts("r", std::vector<std::uint64_t>{0, 1}, 0, 8);
  c.n_even = in.count("n_even", 8, 2, 200);
  c.n_odd = in.count("n_odd", 9, 1, 199);
  if (c.n_even % 2 != 0 || c.n_odd % 2 != 1) throw InvalidSpec("coker: n_even must be even and n_odd odd");
  for (auto r : c.coranks)
    if (r > (r % 2 ? c.n_odd : c.n_even)) throw InvalidSpec("coker: corank exceeds the matrix size");
  c.samples = in.count("samples", 10000, 1, kMaxSamples);
  c.budget = in.count("budget", 1'000'000, 1, kMaxSamples);
  c.policy = read_policy(in);
  in.finish();
  return c;
}

namespace {

RankSeries parse_series(Params& in) {
  RankSeries s;
  s.n = in.count("n", std::nullopt, 1, 60);
  s.r = static_cast<unsigned>(in.count("r", std::nullopt, 0, 60));
  if (s.r > s.n) throw InvalidSpec("rank-scaling: r exceeds n");
  s.bounds = in.counts("X", std::nullopt, 1, 1'000'000'000);
  s.samples = in.counts("samples", std::vector<std::uint64_t>{1'000'000}, 1, kMaxSamples);
  if (s.samples.size() == 1) s.samples.resize(s.bounds.size(), s.samples[0]);
  if (s.samples.size() != s.bounds.size())
    throw InvalidSpec("rank-scaling: samples must be a scalar or match X in length");
  s.exact_bounds = in.has("exact_X") ? in.counts("exact_X", std::nullopt, 1, 1'000'000) : std::vector<std::uint64_t>{};
  in.finish();
  return s;
}

}  // namespace

RankScalingConfig parse_rank_scaling(const Json& params) {
  RankScalingConfig c;
  if (params.is_object() && params.contains("series")) {
    Params in(params, "rank-scaling");
    const Json& list = in.raw("series");
    in.finish();
    if (!list.is_array() || list.empty()) throw InvalidSpec("rank-scaling: series must be a nonempty array");
    for (const auto& item : list) {
      Params sub(item, "rank-scaling");
      c.series.push_back(parse_series(sub));
    }
  } else {
    Params in(params, "rank-scaling");
    c.series.push_back(parse_series(in));
  }
  return c;
}

HeightScanConfig parse_height_scan(const Json& params, const std::string& kind) {
  Params in(params, kind);
  HeightScanConfig c;
  c.heights = in.reals("H");
  c.curves = in.count("curves", 100000, 1, kMaxSamples);
  c.options.eta_scale = in.real("eta_scale", kDefaultEtaScale);
  c.options.exponent = in.real("exponent", kDefaultShaExponent);
  const std::string mode = in.text("mode", "fixed");
  if (mode == "fixed") {
    c.options.mode = CountMode::Fixed;
  } else if (mode == "proportional") {
    c.options.mode = CountMode::Proportional;
  } else {
    throw InvalidSpec(kind + ": mode must be 'fixed' or 'proportional'");
  }
  in.finish();
  if (kind == "height-scan") {
    if (c.heights.size() < 3) throw InvalidSpec("height-scan: needs at least 3 heights");
    if (!std::is_sorted(c.heights.begin(), c.heights.end()) ||
        std::adjacent_find(c.heights.begin(), c.heights.end()) != c.heights.end())
      throw InvalidSpec("height-scan: heights must be strictly increasing");
  }
  for (double H : c.heights) {
    try {
      calibrate(H, c.options.exponent, c.options.eta_scale);
    } catch (const Error& e) {
      throw InvalidSpec(kind + ": H=" + key_number(H) + ": " + e.what());
    }
  }
  return c;
}

OraclesConfig parse_oracles(const Json& params) {
  Params in(params, "oracles");
  OraclesConfig c;
  c.snf_samples = in.count("snf_samples", 10000, 0, kMaxSamples);
  c.coker_samples = in.count("coker_samples", 10000, 0, kMaxSamples);
  c.chi_draws = in.count("chi_draws", 100000, 0, kMaxSamples);
  c.alpha = in.real("alpha", 1e-3);
  if (!(c.alpha > 0 && c.alpha < 1)) throw InvalidSpec("oracles: alpha must lie in (0, 1)");
  if (in.has("lagrangian_cases")) {
    const Json& cases = in.raw("lagrangian_cases");
    if (!cases.is_array()) throw InvalidSpec("oracles: lagrangian_cases must be an array of [p, n, e]");
    for (const auto& t : cases) {
      if (!t.is_array() || t.size() != 3) throw InvalidSpec("oracles: lagrangian_cases entries are [p, n, e]");
      std::array<std::uint64_t, 3> v{};
      for (std::size_t i = 0; i < 3; ++i) v[i] = json_count(t[i], "oracles: lagrangian_cases");
      if (!is_prime(v[0]) || v[1] < 1 || v[2] < 1) throw InvalidSpec("oracles: bad lagrangian case");
      c.lagrangian_cases.push_back(v);
    }
  } else {
    c.lagrangian_cases = {{2, 1, 1}, {2, 2, 1}, {3, 1, 1}, {2, 1, 2}};
  }
  c.primes = in.counts("mean_primes", std::vector<std::uint64_t>{2, 3, 5, 7}, 2, 1'000'003);
  require_primes(c.primes, "oracles");
  in.finish();
  return c;
}

DeterminismConfig parse_determinism(const Json& params) {
  Params in(params, "determinism");
  DeterminismConfig c;
  const Json& targets = in.raw("targets");
  if (!targets.is_array() || targets.empty()) throw InvalidSpec("determinism: targets must be a nonempty array");
  for (const auto& t : targets) {
    if (!t.is_string()) throw InvalidSpec("determinism: targets are catalog names");
    const auto spec = catalog_spec(t.get<std::string>());
    if (!spec) throw InvalidSpec("determinism: no catalog entry '" + t.get<std::string>() + "'");
    if (spec->kind == "determinism") throw InvalidSpec("determinism: targets cannot be determinism runs");
    c.targets.push_back(t.get<std::string>());
  }
  c.jobs = in.counts("jobs", std::vector<std::uint64_t>{1, 4}, 1, 256);
  if (c.jobs.size() < 2) throw InvalidSpec("determinism: needs at least two job counts");
  if (in.has("samples")) c.samples = in.count("samples", std::nullopt, 1, kMaxSamples);
  in.finish();
  return c;
}

std::string key_number(double x) {
  char buf[64];
  if (x >= 0 && x < 9007199254740992.0 && std::floor(x) == x) {
    std::snprintf(buf, sizeof buf, "%.0f", x);
  } else {
    std::snprintf(buf, sizeof buf, "%.6g", x);
  }
  return buf;
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace detail

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"census",      "selmer-dist", "selmer-avg", "rst",     "coker",
                                              "rank-scaling", "height-scan", "sha-average", "oracles", "determinism"};
  return kinds;
}

namespace {

void validate_expect(const Json& expect) {
  if (!expect.is_object()) throw InvalidSpec("expect must be an object");
  for (const auto& [metric, rule] : expect.items()) {
    const std::string where = "expect." + metric;
    if (!rule.is_object()) throw InvalidSpec(where + " must be an object");
    for (const auto& [k, v] : rule.items()) {
      if (k == "strict") {
        if (!v.is_boolean()) throw InvalidSpec(where + ".strict must be a boolean");
      } else if (k == "value" || k == "tol" || k == "rel_tol" || k == "min" || k == "max") {
        if (!v.is_number()) throw InvalidSpec(where + "." + k + " must be a number");
      } else {
        throw InvalidSpec(where + ": unknown key '" + k + "'");
      }
    }
    const bool has_value = rule.contains("value");
    const bool has_tol = rule.contains("tol") || rule.contains("rel_tol");
    const bool has_range = rule.contains("min") || rule.contains("max");
    if (has_value != has_tol || has_value == has_range || (rule.contains("tol") && rule.contains("rel_tol")))
      throw InvalidSpec(where + " needs either value with tol or rel_tol, or min/max");
    for (const char* k : {"tol", "rel_tol"})
      if (rule.contains(k) && rule.at(k).get<double>() < 0) throw InvalidSpec(where + "." + k + " must be >= 0");
  }
}

}  // namespace

void validate_spec(const ExperimentSpec& spec) {
  using namespace detail;
  if (spec.name.empty()) throw InvalidSpec("name is required");
  if (spec.parallelism < 1 || spec.parallelism > 256) throw InvalidSpec("parallelism must lie in [1, 256]");
  validate_expect(spec.expect);
  const std::string& k = spec.kind;
  if (k == "census") {
    parse_census(spec.params);
  } else if (k == "selmer-dist") {
    parse_selmer_dist(spec.params);
  } else if (k == "selmer-avg") {
    parse_selmer_avg(spec.params);
  } else if (k == "rst") {
    parse_rst(spec.params);
  } else if (k == "coker") {
    parse_coker(spec.params);
  } else if (k == "rank-scaling") {
    parse_rank_scaling(spec.params);
  } else if (k == "height-scan" || k == "sha-average") {
    parse_height_scan(spec.params, k);
  } else if (k == "oracles") {
    parse_oracles(spec.params);
  } else if (k == "determinism") {
    parse_determinism(spec.params);
  } else {
    throw InvalidSpec("unknown kind '" + k + "'");
  }
}

ExperimentSpec spec_from_json(const Json& doc) {
  if (!doc.is_object()) throw InvalidSpec("spec must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    static const std::set<std::string> known{"name", "kind", "params", "seed", "parallelism", "output", "expect"};
    if (!known.count(key)) throw InvalidSpec("unknown field '" + key + "'");
  }
  ExperimentSpec spec;
  auto text = [&](const char* key, bool required) -> std::string {
    if (!doc.contains(key)) {
      if (required) throw InvalidSpec(std::string(key) + " is required");
      return {};
    }
    if (!doc.at(key).is_string()) throw InvalidSpec(std::string(key) + " must be a string");
    return doc.at(key).get<std::string>();
  };
  spec.name = text("name", true);
  spec.kind = text("kind", true);
  spec.output = text("output", false);
  if (!doc.contains("seed")) throw InvalidSpec("seed is required");
  spec.seed = detail::json_count(doc.at("seed"), "seed");
  if (doc.contains("parallelism"))
    spec.parallelism = static_cast<unsigned>(std::min<std::uint64_t>(detail::json_count(doc.at("parallelism"), "parallelism"), 1000));
  if (doc.contains("params")) spec.params = doc.at("params");
  if (doc.contains("expect")) spec.expect = doc.at("expect");
  validate_spec(spec);
  return spec;
}

Json spec_to_json(const ExperimentSpec& spec) {
  Json doc;
  doc["name"] = spec.name;
  doc["kind"] = spec.kind;
  doc["params"] = spec.params;
  doc["seed"] = spec.seed;
  doc["parallelism"] = spec.parallelism;
  doc["output"] = spec.output;
  doc["expect"] = spec.expect;
  return doc;
}

void override_samples(ExperimentSpec& spec, std::uint64_t samples) {
  Json& p = spec.params;
  const std::string& k = spec.kind;
  if (k == "selmer-dist" || k == "selmer-avg" || k == "coker" || k == "determinism") {
    p["samples"] = samples;
  } else if (k == "rst") {
    p["samples"] = samples;
    if (p.contains("coker_samples") && detail::json_count(p["coker_samples"], "coker_samples") > 0)
      p["coker_samples"] = samples;
  } else if (k == "rank-scaling") {
    if (p.contains("series")) {
      for (auto& s : p["series"]) s["samples"] = samples;
    } else {
      p["samples"] = samples;
    }
  } else if (k == "height-scan" || k == "sha-average") {
    p["curves"] = samples;
  } else if (k == "oracles") {
    p["snf_samples"] = samples;
    p["coker_samples"] = samples;
    p["chi_draws"] = samples;
  }
}

}  // namespace selmerlab
