#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vrjp/config.hpp"

namespace vrjp {

/// A column-major-agnostic CSV table; cells are already formatted.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
};

struct Metric {
  std::string name;
  double estimate = 0.0;
  /// Absent for quantities that are not Monte Carlo estimates.
  std::optional<double> stderr;
  std::size_t replicas = 0;
};

/// Everything a run reports besides its tables. Only `wall_seconds` and
/// `timestamp` vary between two runs with the same config; they are written
/// under the "timing" key.
struct RunSummary {
  ExperimentConfig config;
  std::vector<Metric> metrics;
  std::vector<std::string> warnings;
  /// Free-form labelled results (classification labels, status strings).
  std::vector<std::pair<std::string, std::string>> labels;
  std::vector<std::string> files;
  double wall_seconds = 0.0;
  std::string timestamp;

  void add_metric(std::string name, double estimate, std::optional<double> stderr = {},
                  std::size_t replicas = 0);
  void add_label(std::string key, std::string value);
};

std::string tool_version();

/// JSON with sorted keys, two-space indent and a trailing newline.
std::string to_json(const RunSummary& summary);

/// Writes `# seed=<seed> config_hash=<hex>`, the header row, then the rows.
/// Fields containing a comma, quote or newline are quoted, quotes doubled.
void write_csv(std::ostream& out, const Table& table, const ExperimentConfig& config);

std::string csv_escape(const std::string& field);

}  // namespace vrjp
