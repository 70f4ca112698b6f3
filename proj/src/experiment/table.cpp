#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "configs.hpp"
#include "selmerlab/core/error.hpp"

namespace selmerlab {
namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_row(std::ostream& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
  out << '\n';
}

}  // namespace

std::string rows_csv(const ResultTable& table) {
  std::ostringstream out;
  write_row(out, table.columns);
  for (const auto& row : table.rows) write_row(out, row);
  return out.str();
}

void write_csv(std::ostream& out, const ResultTable& table) {
  for (const auto& [k, v] : table.metadata) out << "# " << k << ": " << v << '\n';
  for (const auto& [k, v] : table.summary) out << "# summary " << k << ": " << detail::num(v) << '\n';
  for (const auto& c : table.checks)
    out << "# check " << c.metric << ": " << (c.passed ? "PASS" : "FAIL") << " x=" << detail::num(c.value) << " "
        << c.rule << '\n';
  out << rows_csv(table);
}

Json table_to_json(const ResultTable& table) {
  Json doc;
  Json meta = Json::object();
  for (const auto& [k, v] : table.metadata) meta[k] = k == "spec" ? Json::parse(v) : Json(v);
  doc["metadata"] = meta;
  doc["columns"] = table.columns;
  doc["rows"] = table.rows;
  Json summary = Json::object();
  // JSON has no NaN; unavailable metrics become null.
  for (const auto& [k, v] : table.summary) summary[k] = std::isfinite(v) ? Json(v) : Json(nullptr);
  doc["summary"] = summary;
  Json checks = Json::array();
  for (const auto& c : table.checks)
    checks.push_back({{"metric", c.metric},
                      {"value", std::isfinite(c.value) ? Json(c.value) : Json(nullptr)},
                      {"rule", c.rule},
                      {"passed", c.passed}});
  doc["checks"] = checks;
  doc["passed"] = table.passed();
  return doc;
}

void write_outputs(const ExperimentSpec& spec, const ResultTable& table) {
  const std::string prefix = spec.output.empty() ? spec.name : spec.output;
  std::ofstream csv(prefix + ".csv", std::ios::binary);
  if (!csv) throw Error("cannot write " + prefix + ".csv");
  write_csv(csv, table);
  std::ofstream json(prefix + ".json", std::ios::binary);
  if (!json) throw Error("cannot write " + prefix + ".json");
  json << table_to_json(table).dump(2) << '\n';
}

}  // namespace selmerlab
