#include "vrjp/walk.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "vrjp/errors.hpp"
#include "vrjp/scalar_math.hpp"

namespace vrjp {

namespace {

void ensure_slot(WalkState& s, VertexId v) {
  if (v >= s.occupation.size()) {
    const std::size_t n = std::max<std::size_t>(v + 1, s.occupation.size() * 2);
    s.occupation.resize(n, 0.0);
    s.visits.resize(n, 0);
  }
}

// Holds at the current vertex for at most `cap` time. Returns true if the
// walk jumped, false if the holding was cut at the cap.
bool advance(WalkState& s, RootedTree& tree, double c, RngStream& rng, double cap) {
  const VertexId v = s.current;
  const VertexId parent = tree.parent(v);
  const auto kids = tree.children(v);
  double total = 0.0;
  if (parent != kNoParent) total += c + s.occupation_at(parent);
  for (VertexId u : kids) total += c + s.occupation_at(u);
  if (!(total > 0.0)) throw StructuralError("VRJP at a vertex with no neighbours");

  ensure_slot(s, v);
  const double hold = rng.exponential(total);
  if (hold >= cap) {
    s.occupation[v] += cap;
    s.clock += cap;
    return false;
  }
  s.occupation[v] += hold;
  s.clock += hold;

  double pick = rng.uniform() * total;
  VertexId next = parent;
  if (parent != kNoParent) pick -= c + s.occupation_at(parent);
  if (parent == kNoParent || (pick >= 0.0 && !kids.empty())) {
    next = kids.back();
    for (VertexId u : kids) {
      pick -= c + s.occupation_at(u);
      if (pick < 0.0) {
        next = u;
        break;
      }
    }
  }
  ensure_slot(s, next);
  s.current = next;
  ++s.visits[next];
  ++s.events;
  s.max_height = std::max(s.max_height, tree.height(next));
  return true;
}

}  // namespace

double WalkState::total_occupation() const {
  double sum = 0.0;
  for (double o : occupation) sum += o;
  return sum;
}

WalkState start_walk(VertexId root) {
  WalkState s;
  s.current = root;
  s.occupation.assign(static_cast<std::size_t>(root) + 1, 0.0);
  s.visits.assign(static_cast<std::size_t>(root) + 1, 0);
  s.visits[root] = 1;
  return s;
}

void step(WalkState& state, RootedTree& tree, double c, RngStream& rng) {
  advance(state, tree, c, rng, std::numeric_limits<double>::infinity());
}

RunResult run(RootedTree& tree, double c, const StopRule& stop, RngStream& rng,
              const RunOptions& options, WalkState state) {
  if (!(c > 0.0)) throw DomainError("VRJP requires c > 0");
  if (!(stop.value > 0.0)) throw DomainError("stop rule parameter must be positive");
  if (stop.kind == StopKind::root_local_time && stop.value < c) {
    throw DomainError("root local time target must be >= c");
  }
  const VertexId root = tree.root();
  auto emit = [&] {
    if (options.trace) {
      options.trace({state.events, state.clock, tree.height(state.current),
                     state.occupation_at(root)});
    }
  };

  const double inf = std::numeric_limits<double>::infinity();
  for (;;) {
    double cap = inf;
    switch (stop.kind) {
      case StopKind::root_local_time:
        if (state.current == root) {
          const double remaining = (stop.value - c) - state.occupation_at(root);
          if (remaining <= 0.0) {
            emit();
            return {std::move(state), StopReason::rule_fired};
          }
          cap = remaining;
        }
        break;
      case StopKind::hit_height:
        if (tree.height(state.current) >= static_cast<int>(stop.value)) {
          emit();
          return {std::move(state), StopReason::rule_fired};
        }
        break;
      case StopKind::clock_budget:
        if (state.clock >= stop.value) {
          emit();
          return {std::move(state), StopReason::rule_fired};
        }
        cap = stop.value - state.clock;
        break;
      case StopKind::event_budget:
        if (static_cast<double>(state.events) >= stop.value) {
          emit();
          return {std::move(state), StopReason::rule_fired};
        }
        break;
    }
    if (state.events >= options.max_events) {
      emit();
      return {std::move(state), StopReason::budget_exceeded};
    }
    const double clock_left = options.max_clock - state.clock;
    if (clock_left <= 0.0) {
      emit();
      return {std::move(state), StopReason::budget_exceeded};
    }
    const bool clock_cut = clock_left < cap;
    const bool jumped = advance(state, tree, c, rng, std::min(cap, clock_left));
    if (!jumped && clock_cut) {
      state.clock = options.max_clock;
      emit();
      return {std::move(state), StopReason::budget_exceeded};
    }
    if (!jumped) {
      // The holding was cut on the target, so the stop rule fires exactly.
      if (stop.kind == StopKind::root_local_time) state.occupation[root] = stop.value - c;
      if (stop.kind == StopKind::clock_budget) state.clock = stop.value;
      emit();
      return {std::move(state), StopReason::rule_fired};
    }
    emit();
  }
}

double GnExperiment::empirical_below(double a) const {
  if (samples.empty()) return 0.0;
  const double level = std::pow(a, n);
  const auto below = std::count_if(samples.begin(), samples.end(),
                                   [level](double g) { return g < level; });
  return static_cast<double>(below) / static_cast<double>(samples.size());
}

double GnExperiment::bound(double a) const {
  return std::pow(mu * std::sqrt(a), n) * static_cast<double>(vertices_at_n);
}

GnExperiment g_n_experiment(RootedTree& tree, double c, int n, std::size_t replicas,
                            const RngStream& rng, const RunOptions& options) {
  if (n < 1) throw DomainError("g_n_experiment requires n >= 1");
  GnExperiment out;
  out.n = n;
  out.c = c;
  out.mu = mu_direct(c).mu;
  out.vertices_at_n = tree.count_at_height(n);
  out.samples.reserve(replicas);
  RunOptions quiet = options;
  quiet.trace = nullptr;
  for (std::size_t r = 0; r < replicas; ++r) {
    RngStream s = rng.substream(r);
    RunResult res = run(tree, c, StopRule::hit_height(n), s, quiet);
    if (res.reason == StopReason::budget_exceeded) {
      ++out.budget_exceeded;
      continue;
    }
    out.samples.push_back(res.state.local_time(tree.root(), c));
  }
  return out;
}

RecurrenceProfile recurrence_diagnostic(RootedTree& tree, double c,
                                        const std::vector<std::uint64_t>& checkpoints,
                                        RngStream& rng) {
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end())) {
    throw DomainError("checkpoints must be increasing");
  }
  RecurrenceProfile profile{c, {}};
  WalkState state = start_walk(tree.root());
  for (std::uint64_t target : checkpoints) {
    if (target > state.events) {
      RunResult res = run(tree, c, StopRule::event_budget(target), rng, {}, std::move(state));
      state = std::move(res.state);
    }
    profile.checkpoints.push_back({state.events, state.clock, state.occupation_at(tree.root()),
                                   state.max_height, tree.height(state.current)});
  }
  return profile;
}

std::function<void(const TraceRow&)> csv_trace_writer(std::ostream& out) {
  out << "event_index,clock,vertex_height,root_occupation\n";
  return [&out](const TraceRow& row) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%llu,%.17g,%d,%.17g\n",
                  static_cast<unsigned long long>(row.event_index), row.clock, row.vertex_height,
                  row.root_occupation);
    out << buf;
  };
}

}  // namespace vrjp
