#include "vrjp/report.hpp"

#include <ostream>

#include <nlohmann/json.hpp>

#include "vrjp/errors.hpp"

#ifndef VRJP_VERSION
#define VRJP_VERSION "unknown"
#endif

namespace vrjp {

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw StructuralError("row width does not match header");
  rows.push_back(std::move(row));
}

void RunSummary::add_metric(std::string name, double estimate, std::optional<double> stderr,
                            std::size_t replicas) {
  metrics.push_back({std::move(name), estimate, stderr, replicas});
}

void RunSummary::add_label(std::string key, std::string value) {
  labels.emplace_back(std::move(key), std::move(value));
}

std::string tool_version() { return VRJP_VERSION; }

std::string to_json(const RunSummary& s) {
  using nlohmann::json;
  json j;
  j["command"] = s.config.command();
  j["seed"] = s.config.seed();
  j["config_hash"] = s.config.hash_hex();
  j["config"] = s.config.entries();
  j["version"] = tool_version();
  json metrics = json::array();
  for (const Metric& m : s.metrics) {
    json mj;
    mj["name"] = m.name;
    mj["estimate"] = m.estimate;
    mj["stderr"] = m.stderr ? json(*m.stderr) : json(nullptr);
    mj["replicas"] = m.replicas;
    metrics.push_back(std::move(mj));
  }
  j["metrics"] = std::move(metrics);
  json labels = json::object();
  for (const auto& [k, v] : s.labels) labels[k] = v;
  j["labels"] = std::move(labels);
  j["warnings"] = s.warnings;
  j["files"] = s.files;
  j["timing"] = {{"wall_seconds", s.wall_seconds}, {"timestamp", s.timestamp}};
  return j.dump(2) + "\n";
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

void write_csv(std::ostream& out, const Table& table, const ExperimentConfig& config) {
  out << "# seed=" << config.seed() << " config_hash=" << config.hash_hex() << "\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << csv_escape(cells[i]);
    }
    out << "\n";
  };
  line(table.columns);
  for (const auto& row : table.rows) line(row);
}

}  // namespace vrjp
