// selmerlab: run model experiments from flags, JSON specs, or the catalog.
//
// Exit status: 0 success, 1 other error, 2 invalid spec or arguments,
// 3 a declared expectation failed.

#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "selmerlab/core/error.hpp"
#include "selmerlab/experiment/experiment.hpp"

using namespace selmerlab;

namespace {

constexpr int kExitOther = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitMismatch = 3;

struct Common {
  std::uint64_t seed = 0;
  unsigned jobs = 0;
  std::string out;
  std::uint64_t samples = 0;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c, bool seed_required) {
  auto* seed = cmd->add_option("--seed", c.seed, "master seed (64-bit)");
  if (seed_required) seed->required();
  cmd->add_option("--jobs", c.jobs, "worker threads (default 1, or the spec's value)")->check(CLI::Range(1u, 256u));
  cmd->add_option("--out", c.out, "output path prefix for .csv and .json");
  cmd->add_option("--samples", c.samples, "samples (curves) per point");
  cmd->add_flag("--quiet", c.quiet, "do not echo the table to stdout");
}

int execute(ExperimentSpec spec, const Common& c, bool seed_given) {
  if (seed_given) spec.seed = c.seed;
  if (c.jobs > 0) spec.parallelism = c.jobs;
  if (!c.out.empty()) spec.output = c.out;
  if (spec.output.empty()) spec.output = spec.name;
  if (c.samples > 0) override_samples(spec, c.samples);
  validate_spec(spec);
  const auto table = run_experiment(spec);
  write_outputs(spec, table);
  if (!c.quiet) write_csv(std::cout, table);
  if (!table.passed()) {
    for (const auto& chk : table.checks)
      if (!chk.passed) std::cerr << "expectation failed: " << chk.metric << " = " << chk.value << ", " << chk.rule << '\n';
    return kExitMismatch;
  }
  return 0;
}

Json list_or_scalar(const std::vector<std::uint64_t>& v) {
  if (v.size() == 1) return v[0];
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-matrix and Lagrangian-intersection models of Selmer and Sha statistics"};
  app.require_subcommand(1);
  Common common;

  std::vector<std::uint64_t> heights{100};
  auto* census = app.add_subcommand("census", "count minimal curves y^2 = x^3 + Ax + B by height");
  census->add_option("--H", heights, "height bounds");

  std::vector<std::uint64_t> primes{2};
  std::size_t n = 10;
  auto* dist = app.add_subcommand("selmer-dist", "intersection dimension of two random Lagrangians over F_p");
  dist->add_option("--p", primes, "primes");
  dist->add_option("--n", n, "half dimension");

  std::vector<std::uint64_t> moduli{2, 3, 4, 5, 8, 9};
  std::size_t n_avg = 20;
  auto* avg = app.add_subcommand("selmer-avg", "mean intersection order over Z/m against sigma(m)");
  avg->add_option("--m", moduli, "prime-power moduli");
  avg->add_option("--n", n_avg, "half dimension");

  std::vector<std::uint64_t> rst_primes{2}, rst_sizes{6};
  std::uint64_t coker_samples = 0;
  auto* rst = app.add_subcommand("rst", "corank of R and structure of T for pairs of Z_p-Lagrangians");
  rst->add_option("--p", rst_primes, "primes");
  rst->add_option("--n", rst_sizes, "half dimensions");
  rst->add_option("--coker-samples", coker_samples, "also sample alternating cokernels");

  std::uint64_t coker_p = 2;
  std::vector<std::uint64_t> coranks{0, 1};
  std::size_t n_even = 8, n_odd = 9;
  auto* coker = app.add_subcommand("coker", "conditioned T vs conditioned alternating cokernel");
  coker->add_option("--p", coker_p, "prime");
  coker->add_option("--r", coranks, "coranks");
  coker->add_option("--n-even", n_even, "matrix size for even r");
  coker->add_option("--n-odd", n_odd, "matrix size for odd r");

  std::size_t rank_n = 3;
  unsigned rank_r = 3;
  std::vector<std::uint64_t> bounds{2, 4, 8, 16, 32}, exact_bounds;
  auto* rank = app.add_subcommand("rank-scaling", "Prob(rk ker A >= r) for bounded alternating matrices");
  rank->add_option("--n", rank_n, "matrix size");
  rank->add_option("--r", rank_r, "rank threshold");
  rank->add_option("--X", bounds, "entry bounds");
  rank->add_option("--exact-X", exact_bounds, "bounds to enumerate exactly");

  std::vector<double> scan_heights{1e6, 3.1622776601683792e7, 1e9, 3.1622776601683792e10, 1e12};
  double eta_scale = 0.4;
  bool proportional = false;
  auto* scan = app.add_subcommand("height-scan", "rank frequencies of simulated curves across heights");
  scan->add_option("--H", scan_heights, "heights, increasing");
  scan->add_option("--eta-scale", eta_scale, "eta0 = scale * sqrt(ln H)");
  scan->add_flag("--proportional", proportional, "scale the curve count with H^(5/6)");

  std::vector<double> sha_heights{1e8, 1e12};
  auto* sha = app.add_subcommand("sha-average", "average pseudo-Sha of rank-0 simulated curves");
  sha->add_option("--H", sha_heights, "heights");
  sha->add_option("--eta-scale", eta_scale, "eta0 = scale * sqrt(ln H)");

  bool catalog_json = false;
  auto* cat = app.add_subcommand("catalog", "list the built-in experiments");
  cat->add_flag("--json", catalog_json, "print full specs as JSON");

  std::string spec_file, catalog_name;
  auto* run = app.add_subcommand("run", "run a JSON spec (-f) or a catalog entry (--name)");
  auto* file_opt = run->add_option("-f,--file", spec_file, "spec file");
  run->add_option("--name", catalog_name, "catalog entry")->excludes(file_opt);

  for (auto* cmd : {census, dist, avg, rst, coker, rank, scan, sha}) add_common(cmd, common, true);
  add_common(run, common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (cat->parsed()) {
      if (catalog_json) {
        Json all = Json::array();
        for (const auto& e : catalog()) all.push_back(spec_to_json(e.spec));
        std::cout << all.dump(2) << '\n';
      } else {
        for (const auto& e : catalog()) std::cout << e.name << "  [" << e.budget << "]  " << e.description << '\n';
      }
      return 0;
    }
    if (run->parsed()) {
      ExperimentSpec spec;
      if (!spec_file.empty()) {
        std::ifstream in(spec_file);
        if (!in) throw Error("cannot read " + spec_file);
        Json doc;
        try {
          doc = Json::parse(in);
        } catch (const Json::parse_error& e) {
          throw InvalidSpec(std::string("malformed JSON: ") + e.what());
        }
        spec = spec_from_json(doc);
      } else if (!catalog_name.empty()) {
        const auto found = catalog_spec(catalog_name);
        if (!found) throw InvalidSpec("no catalog entry '" + catalog_name + "'");
        spec = *found;
      } else {
        throw InvalidSpec("run needs -f FILE or --name ENTRY");
      }
      return execute(spec, common, run->get_option("--seed")->count() > 0);
    }

    ExperimentSpec spec;
    spec.seed = common.seed;
    Json& p = spec.params;
    if (census->parsed()) {
      spec.kind = "census";
      p["H"] = list_or_scalar(heights);
    } else if (dist->parsed()) {
      spec.kind = "selmer-dist";
      p = {{"p", list_or_scalar(primes)}, {"n", n}};
    } else if (avg->parsed()) {
      spec.kind = "selmer-avg";
      p = {{"m", list_or_scalar(moduli)}, {"n", n_avg}};
    } else if (rst->parsed()) {
      spec.kind = "rst";
      p = {{"p", list_or_scalar(rst_primes)}, {"n", list_or_scalar(rst_sizes)}, {"coker_samples", coker_samples}};
    } else if (coker->parsed()) {
      spec.kind = "coker";
      p = {{"p", coker_p}, {"r", coranks}, {"n_even", n_even}, {"n_odd", n_odd}};
    } else if (rank->parsed()) {
      spec.kind = "rank-scaling";
      p = {{"n", rank_n}, {"r", rank_r}, {"X", bounds}};
      if (!exact_bounds.empty()) p["exact_X"] = exact_bounds;
    } else if (scan->parsed()) {
      spec.kind = "height-scan";
      p = {{"H", scan_heights}, {"eta_scale", eta_scale}, {"mode", proportional ? "proportional" : "fixed"}};
    } else {
      spec.kind = "sha-average";
      p = {{"H", sha_heights}, {"eta_scale", eta_scale}};
    }
    spec.name = spec.kind;
    return execute(spec, common, true);
  } catch (const InvalidSpec& e) {
    std::cerr << "invalid spec: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
}
