#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "vrjp/rng.hpp"
#include "vrjp/tree.hpp"

namespace vrjp {

/// State of a VRJP(c) run. The local time of u is c + occupation(u).
struct WalkState {
  VertexId current = 0;
  double clock = 0.0;
  std::uint64_t events = 0;
  int max_height = 0;
  std::vector<double> occupation;
  std::vector<std::uint64_t> visits;

  double occupation_at(VertexId v) const { return v < occupation.size() ? occupation[v] : 0.0; }
  double local_time(VertexId v, double c) const { return c + occupation_at(v); }
  std::uint64_t visits_at(VertexId v) const { return v < visits.size() ? visits[v] : 0; }
  /// Sum of all occupation times; equals clock up to rounding.
  double total_occupation() const;
};

/// Walk at the root at time 0 with no occupation anywhere.
WalkState start_walk(VertexId root = 0);

enum class StopKind { root_local_time, hit_height, clock_budget, event_budget };

struct StopRule {
  StopKind kind = StopKind::event_budget;
  double value = 0.0;

  /// Fires when c + occupation(root) reaches t (t >= c).
  static StopRule root_local_time(double t) { return {StopKind::root_local_time, t}; }
  /// Fires when the walk first stands at height n (n >= 1).
  static StopRule hit_height(int n) { return {StopKind::hit_height, double(n)}; }
  /// Fires when the clock reaches T.
  static StopRule clock_budget(double T) { return {StopKind::clock_budget, T}; }
  /// Fires after M jumps.
  static StopRule event_budget(std::uint64_t M) { return {StopKind::event_budget, double(M)}; }
};

enum class StopReason { rule_fired, budget_exceeded };

struct TraceRow {
  std::uint64_t event_index;
  double clock;
  int vertex_height;
  double root_occupation;
};

struct RunOptions {
  /// Hard cap on jumps for every rule; hitting it gives budget_exceeded.
  std::uint64_t max_events = 100'000'000;
  /// Hard cap on the clock, enforced exactly; hitting it first gives
  /// budget_exceeded.
  double max_clock = std::numeric_limits<double>::infinity();
  /// Called after every jump (and once at the end of the run).
  std::function<void(const TraceRow&)> trace;
};

struct RunResult {
  WalkState state;
  StopReason reason;
};

/// One holding period and jump: holds an Exponential(sum_u (c + occ(u)))
/// time at the current vertex, then moves to neighbour u with probability
/// proportional to c + occ(u). Throws StructuralError at an isolated vertex.
void step(WalkState& state, RootedTree& tree, double c, RngStream& rng);

/// Runs from `state` until the rule fires. Holding periods that would
/// overshoot a local-time or clock target are cut exactly at the target
/// (exponential memorylessness), so the rule fires on the target.
RunResult run(RootedTree& tree, double c, const StopRule& stop, RngStream& rng,
              const RunOptions& options = {}, WalkState state = start_walk());

/// G_n = c + occupation(root) when height n is first reached.
struct GnExperiment {
  int n = 0;
  double c = 0.0;
  double mu = 0.0;
  std::size_t vertices_at_n = 0;
  std::vector<double> samples;
  std::size_t budget_exceeded = 0;

  /// Fraction of samples with G_n < a^n.
  double empirical_below(double a) const;
  /// (mu(c) sqrt(a))^n V_n.
  double bound(double a) const;
};

/// Replica r runs on `tree` (quenched) with stream rng.substream(r).
GnExperiment g_n_experiment(RootedTree& tree, double c, int n, std::size_t replicas,
                            const RngStream& rng, const RunOptions& options = {});

struct Checkpoint {
  std::uint64_t events = 0;
  double clock = 0.0;
  double root_occupation = 0.0;
  int max_height = 0;
  int current_height = 0;
};

/// Growth profile of one run: root occupation and maximal height recorded
/// at each event checkpoint (increasing). Interpretation is left to callers;
/// a finite run cannot decide recurrence.
struct RecurrenceProfile {
  double c = 0.0;
  std::vector<Checkpoint> checkpoints;
};

RecurrenceProfile recurrence_diagnostic(RootedTree& tree, double c,
                                        const std::vector<std::uint64_t>& checkpoints,
                                        RngStream& rng);

/// CSV trace writer with header event_index,clock,vertex_height,root_occupation.
std::function<void(const TraceRow&)> csv_trace_writer(std::ostream& out);

}  // namespace vrjp
