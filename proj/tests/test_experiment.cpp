#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "selmerlab/core/error.hpp"
#include "selmerlab/experiment/experiment.hpp"
#include "selmerlab/predictions/predictions.hpp"

using namespace selmerlab;

namespace {

Json base(const std::string& kind, Json params) {
  return {{"name", "t"}, {"kind", kind}, {"params", std::move(params)}, {"seed", 9}};
}

std::filesystem::path scratch() {
  auto dir = std::filesystem::temp_directory_path() / "selmerlab_test_experiment";
  std::filesystem::create_directories(dir);
  return dir;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(SELMERLAB_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("spec validation") {
  CHECK_NOTHROW(spec_from_json(base("census", {{"H", 100}})));
  Json no_seed = base("census", {{"H", 100}});
  no_seed.erase("seed");
  CHECK_THROWS_AS(spec_from_json(no_seed), InvalidSpec);
  CHECK_THROWS_AS(spec_from_json(base("nonsense", Json::object())), InvalidSpec);
  CHECK_THROWS_AS(spec_from_json(base("census", {{"H", 100}, {"bogus", 1}})), InvalidSpec);
  CHECK_THROWS_AS(spec_from_json(base("census", {{"H", -5}})), InvalidSpec);
  CHECK_THROWS_AS(spec_from_json(base("selmer-dist", {{"p", 4}})), InvalidSpec);
  CHECK_THROWS_AS(spec_from_json(base("selmer-avg", {{"m", 6}})), InvalidSpec);
  CHECK_THROWS_AS(spec_from_json(base("coker", {{"n_even", 7}})), InvalidSpec);
  CHECK_THROWS_AS(spec_from_json(base("rank-scaling", {{"n", 3}, {"r", 4}, {"X", 2}})), InvalidSpec);
  CHECK_THROWS_AS(spec_from_json(base("rank-scaling", {{"n", 3}, {"r", 3}, {"X", {2, 4}}, {"samples", {1, 2, 3}}})),
                  InvalidSpec);
  CHECK_THROWS_AS(spec_from_json(base("height-scan", {{"H", {1e6, 1e9}}})), InvalidSpec);
  CHECK_THROWS_AS(spec_from_json(base("height-scan", {{"H", {1e9, 1e6, 1e12}}})), InvalidSpec);
  CHECK_THROWS_AS(spec_from_json(base("sha-average", {{"H", 10}})), InvalidSpec);
  CHECK_THROWS_AS(spec_from_json(base("rst", {{"e_init", 9}, {"e_max", 8}})), InvalidSpec);
  CHECK_THROWS_AS(spec_from_json(base("determinism", {{"targets", {"acc-determinism"}}})), InvalidSpec);
  CHECK_THROWS_AS(spec_from_json(base("determinism", {{"targets", {"nope"}}})), InvalidSpec);

  Json bad_expect = base("census", {{"H", 100}});
  bad_expect["expect"] = {{"count@100", {{"value", 14}}}};
  CHECK_THROWS_AS(spec_from_json(bad_expect), InvalidSpec);
  bad_expect["expect"] = {{"count@100", {{"min", 1}, {"value", 2}, {"tol", 1}}}};
  CHECK_THROWS_AS(spec_from_json(bad_expect), InvalidSpec);
  Json extra = base("census", {{"H", 100}});
  extra["colour"] = "red";
  CHECK_THROWS_AS(spec_from_json(extra), InvalidSpec);
}

TEST_CASE("spec round trip") {
  Json doc = base("rank-scaling", {{"n", 3}, {"r", 3}, {"X", {2, 4, 8}}});
  doc["expect"] = {{"slope@n=3,r=3", {{"min", -4}, {"max", -2}}}};
  const auto spec = spec_from_json(doc);
  const auto again = spec_from_json(spec_to_json(spec));
  CHECK(spec_to_json(again) == spec_to_json(spec));
  CHECK(again.seed == 9);
}

TEST_CASE("census run") {
  auto spec = spec_from_json(base("census", {{"H", {3, 100}}}));
  spec.expect = {{"count@100", {{"value", 14}, {"tol", 0}}}};
  const auto t = run_experiment(spec);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][0] == "100");
  CHECK(t.rows[1][1] == "14");
  CHECK(t.rows[0][1] == "0");
  CHECK(t.passed());
  spec.expect = {{"count@100", {{"value", 15}, {"tol", 0}}}, {"missing", {{"min", 0}}}};
  const auto f = run_experiment(spec);
  CHECK_FALSE(f.passed());
  CHECK_FALSE(f.checks[1].passed);
}

TEST_CASE("selmer-dist carries the oracle column") {
  const auto spec = spec_from_json(base("selmer-dist", {{"p", 2}, {"n", 10}, {"samples", 2000}}));
  const auto t = run_experiment(spec);
  CHECK(t.columns.back() == "oracle");
  std::uint64_t total = 0;
  for (const auto& row : t.rows) {
    total += std::stoull(row[3]);
    const double oracle = std::stod(row[5]);
    CHECK(oracle == doctest::Approx(sel_p_density(2, std::stoul(row[2])).convert_to<double>()).epsilon(1e-9));
  }
  CHECK(total == 2000);
  CHECK(t.summary.at("tv@p=2") < 0.1);
}

TEST_CASE("property: rows depend on seed only, not on parallelism or time") {
  std::vector<Json> specs{
      base("selmer-avg", {{"m", {2, 4}}, {"n", 6}, {"samples", 300}}),
      base("rst", {{"p", 3}, {"n", {2, 3}}, {"samples", 200}, {"coker_samples", 100}, {"coker_n", 4}}),
      base("coker", {{"r", {0, 1}}, {"n_even", 4}, {"n_odd", 5}, {"samples", 100}}),
      base("rank-scaling", {{"n", 3}, {"r", 3}, {"X", {1, 2, 3}}, {"samples", 700000}, {"exact_X", 1}}),
      base("height-scan", {{"H", {1e6, 1e8, 1e10}}, {"curves", 500}}),
      base("sha-average", {{"H", 1e8}, {"curves", 500}}),
      base("oracles", {{"snf_samples", 50}, {"coker_samples", 50}, {"chi_draws", 200}}),
  };
  for (const auto& doc : specs) {
    auto spec = spec_from_json(doc);
    INFO(spec.kind);
    const auto a = run_experiment(spec);
    const auto b = run_experiment(spec);
    spec.parallelism = 3;
    const auto c = run_experiment(spec);
    CHECK(rows_csv(a) == rows_csv(b));
    CHECK(rows_csv(a) == rows_csv(c));
    REQUIRE(a.summary.size() == c.summary.size());
    for (const auto& [k, v] : a.summary) {
      const double w = c.summary.at(k);
      CHECK(((std::isnan(v) && std::isnan(w)) || v == w));
    }
    CHECK_FALSE(a.rows.empty());
    spec.seed = 10;
    CHECK(rows_csv(run_experiment(spec)) != rows_csv(a));
  }
}

TEST_CASE("rank-scaling marks parity-fixed points") {
  const auto t = run_experiment(spec_from_json(base("rank-scaling", {{"n", 5}, {"r", 1}, {"X", {1, 2}}, {"samples", 10}})));
  for (const auto& row : t.rows) CHECK(row[3] == "parity");
}

TEST_CASE("outputs: CSV dialect and JSON mirror") {
  auto spec = spec_from_json(base("census", {{"H", {100, 1000}}}));
  spec.output = (scratch() / "census").string();
  const auto t = run_experiment(spec);
  write_outputs(spec, t);
  std::ifstream csv(spec.output + ".csv");
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(csv, line)) lines.push_back(line);
  std::size_t first_data = 0;
  while (first_data < lines.size() && lines[first_data].rfind("# ", 0) == 0) ++first_data;
  REQUIRE(first_data + 3 == lines.size());
  CHECK(lines[first_data] == "H,count,normalized,constant_ref,ratio");
  CHECK(lines[first_data + 1].rfind("100,14,", 0) == 0);
  bool has_timestamp = false, has_rng = false;
  for (std::size_t i = 0; i < first_data; ++i) {
    has_timestamp |= lines[i].rfind("# timestamp: ", 0) == 0;
    has_rng |= lines[i].find("xoshiro256**") != std::string::npos;
  }
  CHECK(has_timestamp);
  CHECK(has_rng);
  std::ifstream js(spec.output + ".json");
  const Json doc = Json::parse(js);
  CHECK(doc["rows"].size() == 2);
  CHECK(doc["metadata"]["spec"]["kind"] == "census");
  CHECK(doc["summary"]["count@100"] == 14);
}

TEST_CASE("CSV quoting") {
  ResultTable t;
  t.columns = {"group", "n"};
  t.rows = {{"[2,2]", "1"}, {"a\"b", "2"}};
  CHECK(rows_csv(t) == "group,n\n\"[2,2]\",1\n\"a\"\"b\",2\n");
}

TEST_CASE("catalog") {
  const auto& cat = catalog();
  std::set<std::string> names;
  int acceptance = 0;
  for (const auto& e : cat) {
    INFO(e.name);
    CHECK(names.insert(e.name).second);
    CHECK_NOTHROW(validate_spec(e.spec));
    CHECK_FALSE(e.description.empty());
    CHECK_FALSE(e.spec.expect.empty());
    acceptance += e.name.rfind("acc-", 0) == 0;
  }
  CHECK(acceptance == 10);
  for (const char* n : {"acc-census-1e10", "acc-selmer-dist", "acc-selmer-avg", "acc-corank", "acc-square-order",
                        "acc-model-equivalence", "acc-rank-scaling", "acc-rank-exponent-r2", "acc-oracles",
                        "acc-determinism"})
    CHECK(names.count(n));
  CHECK_FALSE(catalog_spec("nope"));
}

TEST_CASE("override_samples") {
  auto s = *catalog_spec("acc-rank-scaling");
  override_samples(s, 77);
  for (const auto& series : s.params["series"]) CHECK(series["samples"] == 77);
  auto h = *catalog_spec("acc-rank-exponent-r2");
  override_samples(h, 77);
  CHECK(h.params["curves"] == 77);
  CHECK_NOTHROW(validate_spec(h));
}

TEST_CASE("CLI exit codes") {
  const auto dir = scratch();
  const std::string out = " --quiet --out " + (dir / "cli").string();
  CHECK(cli("census --seed 1 --H 100" + out) == 0);
  CHECK(std::filesystem::exists(dir / "cli.csv"));
  CHECK(std::filesystem::exists(dir / "cli.json"));
  CHECK(cli("catalog") == 0);
  CHECK(cli("census --H 100" + out) == 2);  // seed is mandatory
  CHECK(cli("selmer-dist --seed 1 --p 4 --samples 10" + out) == 2);
  CHECK(cli("run --name no-such-entry" + out) == 2);
  {
    std::ofstream f(dir / "bad.json");
    f << "{\"name\": \"x\", \"kind\": \"census\", \"seed\": 1, \"params\": {\"H\": 100},"
         " \"expect\": {\"count@100\": {\"value\": 13, \"tol\": 0}}}";
  }
  CHECK(cli("run -f " + (dir / "bad.json").string() + out) == 3);
  {
    std::ofstream f(dir / "broken.json");
    f << "{\"name\": ";
  }
  CHECK(cli("run -f " + (dir / "broken.json").string() + out) == 2);
  CHECK(cli("run -f " + (dir / "missing.json").string() + out) == 1);
  CHECK(cli("run --name demo-census --seed 4" + out) == 0);
}

TEST_CASE("determinism kind") {
  auto spec = *catalog_spec("acc-determinism");
  spec.params["targets"] = {"demo-census", "acc-rank-exponent-r2", "acc-model-equivalence"};
  spec.params["samples"] = 60;
  const auto t = run_experiment(spec);
  CHECK(t.summary.at("identical") == 1);
  CHECK(t.rows.size() == 6);
  CHECK(t.passed());
}
