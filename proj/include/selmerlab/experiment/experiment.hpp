#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace selmerlab {

using Json = nlohmann::ordered_json;

/// census, selmer-dist, selmer-avg, rst, coker, rank-scaling, height-scan,
/// sha-average, oracles, determinism.
const std::vector<std::string>& experiment_kinds();

/// One declarative experiment.
///
/// `expect` maps a summary metric to a rule, one of
///   {"value": v, "tol": t}       |metric - v| <= t
///   {"value": v, "rel_tol": t}   |metric - v| <= t |v|
///   {"min": a, "max": b}         a <= metric <= b (either bound optional;
///                                "strict": true makes both exclusive)
struct ExperimentSpec {
  std::string name;
  std::string kind;
  Json params = Json::object();
  std::uint64_t seed = 0;
  unsigned parallelism = 1;
  std::string output;
  Json expect = Json::object();
};

/// Parses and validates. Throws InvalidSpec.
ExperimentSpec spec_from_json(const Json& doc);
Json spec_to_json(const ExperimentSpec& spec);

/// Throws InvalidSpec naming the first problem found.
void validate_spec(const ExperimentSpec& spec);

/// Sets the per-point sample budget of whatever kind the spec is.
void override_samples(ExperimentSpec& spec, std::uint64_t samples);

struct CheckResult {
  std::string metric;
  double value = 0;
  std::string rule;
  bool passed = false;
};

struct ResultTable {
  /// Written as "# key: value" lines. Only "timestamp" varies between
  /// identical runs.
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::map<std::string, double> summary;
  std::vector<CheckResult> checks;

  bool passed() const;
};

/// Dispatches on spec.kind. Throws InvalidSpec before doing any work if the
/// spec does not validate. Expectations are evaluated into `checks` but a
/// failing check does not throw here.
ResultTable run_experiment(const ExperimentSpec& spec);

void write_csv(std::ostream& out, const ResultTable& table);
Json table_to_json(const ResultTable& table);

/// Writes <output>.csv and <output>.json.
void write_outputs(const ExperimentSpec& spec, const ResultTable& table);

/// The row block of a table as CSV text, without metadata.
std::string rows_csv(const ResultTable& table);

struct CatalogEntry {
  std::string name;
  std::string description;
  /// Rough single-core wall time at the default budget.
  std::string budget;
  ExperimentSpec spec;
};

/// Built-in specs: one per acceptance criterion, named acc-*, plus a few
/// smaller demonstrations.
const std::vector<CatalogEntry>& catalog();
std::optional<ExperimentSpec> catalog_spec(const std::string& name);

}  // namespace selmerlab
