#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "selmerlab/experiment/experiment.hpp"
#include "selmerlab/heuristic/heuristic.hpp"
#include "selmerlab/linalg/padic.hpp"

namespace selmerlab::detail {

/// Typed access to a params object. Every getter marks its key as used;
/// finish() rejects keys nobody asked for.
class Params {
 public:
  Params(const Json& params, std::string kind);

  bool has(const std::string& key) const;
  std::uint64_t count(const std::string& key, std::optional<std::uint64_t> fallback = {},
                      std::uint64_t lo = 0, std::uint64_t hi = UINT64_MAX);
  double real(const std::string& key, std::optional<double> fallback = {});
  /// A scalar or a nonempty array.
  std::vector<std::uint64_t> counts(const std::string& key, std::optional<std::vector<std::uint64_t>> fallback = {},
                                    std::uint64_t lo = 0, std::uint64_t hi = UINT64_MAX);
  std::vector<double> reals(const std::string& key);
  std::string text(const std::string& key, std::optional<std::string> fallback = {});
  const Json& raw(const std::string& key);
  void finish() const;

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;
  const Json& params_;
  std::string kind_;
  std::set<std::string> used_;
};

std::uint64_t json_count(const Json& v, const std::string& where);

struct CensusConfig {
  std::vector<std::uint64_t> heights;
};

struct SelmerDistConfig {
  std::vector<std::uint64_t> primes;
  std::size_t n = 0;
  std::uint64_t samples = 0;
};

struct SelmerAvgConfig {
  /// (p, e) for each requested modulus p^e.
  std::vector<std::pair<std::uint64_t, unsigned>> moduli;
  std::size_t n = 0;
  std::uint64_t samples = 0;
};

struct RstConfig {
  std::vector<std::uint64_t> primes;
  std::vector<std::uint64_t> sizes;
  std::uint64_t samples = 0;
  std::uint64_t coker_samples = 0;
  std::size_t coker_n = 8;
  PrecisionPolicy policy;
};

struct CokerConfig {
  std::uint64_t p = 2;
  std::vector<std::uint64_t> coranks;
  std::size_t n_even = 8;
  std::size_t n_odd = 9;
  std::uint64_t samples = 0;
  std::uint64_t budget = 0;
  PrecisionPolicy policy;
};

struct RankSeries {
  std::size_t n = 0;
  unsigned r = 0;
  std::vector<std::uint64_t> bounds;
  /// One entry per bound.
  std::vector<std::uint64_t> samples;
  std::vector<std::uint64_t> exact_bounds;
};

struct RankScalingConfig {
  std::vector<RankSeries> series;
};

struct HeightScanConfig {
  std::vector<double> heights;
  std::uint64_t curves = 0;
  ScanOptions options;
};

struct OraclesConfig {
  std::uint64_t snf_samples = 0;
  std::uint64_t coker_samples = 0;
  std::uint64_t chi_draws = 0;
  std::vector<std::array<std::uint64_t, 3>> lagrangian_cases;
  double alpha = 1e-3;
  std::vector<std::uint64_t> primes;
};

struct DeterminismConfig {
  std::vector<std::string> targets;
  std::vector<std::uint64_t> jobs;
  std::optional<std::uint64_t> samples;
};

CensusConfig parse_census(const Json& params);
SelmerDistConfig parse_selmer_dist(const Json& params);
SelmerAvgConfig parse_selmer_avg(const Json& params);
RstConfig parse_rst(const Json& params);
CokerConfig parse_coker(const Json& params);
RankScalingConfig parse_rank_scaling(const Json& params);
HeightScanConfig parse_height_scan(const Json& params, const std::string& kind);
OraclesConfig parse_oracles(const Json& params);
DeterminismConfig parse_determinism(const Json& params);

/// "10000000000" for integral values below 2^53, otherwise %.6g.
std::string key_number(double x);
std::string num(double x);

}  // namespace selmerlab::detail
