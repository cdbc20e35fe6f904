#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vrjp/branching.hpp"
#include "vrjp/config.hpp"
#include "vrjp/report.hpp"
#include "vrjp/rng.hpp"
#include "vrjp/scalar_math.hpp"
#include "vrjp/stats.hpp"
#include "vrjp/walk.hpp"

namespace vrjp {

/// critical is a numerical band |b mu(c) - 1| <= tol, not a third phase:
/// b mu(c) = 1 exactly is recurrent.
enum class Phase { recurrent, transient, critical };
const char* to_string(Phase p);

struct Classification {
  Phase phase = Phase::critical;
  double mu = 0.0;
  double b_mu = 0.0;
};

/// Throws DomainError for b <= 1 or c <= 0.
Classification classify_detailed(double b, double c, double tol = 1e-3);
inline Phase classify(double b, double c, double tol = 1e-3) {
  return classify_detailed(b, c, tol).phase;
}

/// Columns c, mu, err_bound on steps + 1 evenly spaced points.
Table mu_curve(double c_min, double c_max, int steps,
               const Quadrature& q = default_quadrature());
void emit_mu_curve(double c_min, double c_max, int steps, std::ostream& out,
                   const ExperimentConfig& config, const Quadrature& q = default_quadrature());

struct PhaseDiagramOptions {
  std::vector<double> b_values{2.0, 4.0};
  std::vector<double> c_values{0.1, 1.0};
  double tol = 1e-3;
  double x0 = 10.0;
  int generations = 25;
  std::size_t survival_replicas = 1000;
  std::size_t population_cap = 20'000;
  std::size_t walk_replicas = 5;
  std::vector<std::uint64_t> checkpoints{1'000, 10'000, 100'000};
  double transient_min_survival = 0.5;
  double recurrent_max_survival = 0.05;
};

struct PhaseCell {
  double b = 0.0;
  double c = 0.0;
  Classification classification;
  std::optional<SurvivalEstimate> survival;
  /// Medians over walk replicas, at the first and the last checkpoint.
  double root_occupation_first = 0.0;
  double root_occupation_last = 0.0;
  double max_height_last = 0.0;
  /// Unset in the critical band or when a sub-run failed.
  std::optional<bool> agreement;
  std::string error;
};

/// Cell (i, j) = (b_values[i], c_values[j]) uses rng.substream(i).substream(j).
std::vector<PhaseCell> run_phase_diagram(const PhaseDiagramOptions& options,
                                         const RngStream& rng);

struct NullRecurrenceOptions {
  double b = 1.0;
  double c = 1.0;
  double t = 2.0;
  std::size_t replicas = 1000;
  /// Clock budgets T; xi(t) is observed up to the largest.
  std::vector<double> clock_budgets{10.0, 100.0, 1'000.0, 10'000.0};
  std::uint64_t max_events = 100'000'000;
  int generations = 5;
  std::size_t chain_replicas = 100'000;
};

struct TruncatedMean {
  double budget = 0.0;
  /// Samples of min(xi(t), budget).
  MeanAccumulator value;
  std::size_t censored = 0;
};

struct GenerationContribution {
  int n = 0;
  double estimate = 0.0;  // b^n (E[Z_n] - c)
  double stderr = 0.0;
  double expected = 0.0;  // b^n (t - c)
};

struct NullRecurrenceProbe {
  std::vector<TruncatedMean> ladder;
  std::vector<GenerationContribution> generations;
  std::size_t event_budget_hits = 0;
};

/// Truncated means of xi(t), the time the root local time needs to reach t,
/// on a b-ary tree (the half-line for b = 1). Growth with the budget is
/// evidence of an infinite mean, not a proof.
NullRecurrenceProbe run_null_recurrence_probe(const NullRecurrenceOptions& options,
                                              const RngStream& rng);

/// Offspring law from "nu" (k:p list) or else "b" (mean, leafless).
OffspringDistribution offspring_from(const ExperimentConfig& config, double default_b);

/// Runs the experiment named by config.command(), writing its CSV files,
/// config.txt and summary.json into config.output_path(). Throws ConfigError,
/// DomainError, NumericalFailure or InsufficientData; on InsufficientData the
/// files have been written.
RunSummary run_experiment(const ExperimentConfig& config);

/// Names accepted by run_experiment.
const std::vector<std::string>& experiment_commands();

}  // namespace vrjp
