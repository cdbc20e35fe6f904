#include "vrjp/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "vrjp/errors.hpp"
#include "vrjp/parallel.hpp"
#include "vrjp/sampling.hpp"
#include "vrjp/scalar_math.hpp"
#include "vrjp/tree.hpp"

namespace vrjp {

namespace fs = std::filesystem;

const char* to_string(Phase p) {
  switch (p) {
    case Phase::recurrent: return "recurrent";
    case Phase::transient: return "transient";
    case Phase::critical: return "critical";
  }
  return "?";
}

Classification classify_detailed(double b, double c, double tol) {
  if (!std::isfinite(b) || !std::isfinite(c)) throw DomainError("classify needs finite b and c");
  if (!(b > 1.0)) throw DomainError("classify requires b > 1");
  if (!(c > 0.0)) throw DomainError("classify requires c > 0");
  Classification out;
  out.mu = mu_direct(c).mu;
  out.b_mu = b * out.mu;
  if (out.b_mu < 1.0 - tol) {
    out.phase = Phase::recurrent;
  } else if (out.b_mu > 1.0 + tol) {
    out.phase = Phase::transient;
  } else {
    out.phase = Phase::critical;
  }
  return out;
}

Table mu_curve(double c_min, double c_max, int steps, const Quadrature& q) {
  if (!(c_min > 0.0) || !(c_max > c_min) || steps < 1) {
    throw DomainError("mu curve needs 0 < c_min < c_max and steps >= 1");
  }
  Table t{{"c", "mu", "err_bound"}, {}};
  for (int i = 0; i <= steps; ++i) {
    const double c = i == steps ? c_max : c_min + (c_max - c_min) * i / steps;
    const MuValue m = mu_direct(c, q);
    t.add_row({format_double(c), format_double(m.mu), format_double(m.err_bound)});
  }
  return t;
}

void emit_mu_curve(double c_min, double c_max, int steps, std::ostream& out,
                   const ExperimentConfig& config, const Quadrature& q) {
  write_csv(out, mu_curve(c_min, c_max, steps, q), config);
}

namespace {

bool is_integer(double b) { return b == std::floor(b) && b >= 1.0 && b < 4294967296.0; }

// Regular tree for integer b, lazy GW tree with mean-b leafless law otherwise.
RootedTree tree_for_mean(double b, std::uint64_t seed) {
  if (is_integer(b)) return regular_tree(static_cast<std::uint32_t>(b));
  return lazy_gw(OffspringDistribution::with_mean(b), seed);
}

double median(std::vector<double> v) { return v.empty() ? 0.0 : quantile(v, 0.5); }

}  // namespace

std::vector<PhaseCell> run_phase_diagram(const PhaseDiagramOptions& o, const RngStream& rng) {
  std::vector<PhaseCell> cells;
  for (std::size_t i = 0; i < o.b_values.size(); ++i) {
    for (std::size_t j = 0; j < o.c_values.size(); ++j) {
      PhaseCell cell;
      cell.b = o.b_values[i];
      cell.c = o.c_values[j];
      const RngStream cell_rng = rng.substream(i).substream(j);
      try {
        cell.classification = classify_detailed(cell.b, cell.c, o.tol);
        SurvivalOptions so;
        so.population_cap = o.population_cap;
        cell.survival = estimate_survival(o.x0, OffspringDistribution::with_mean(cell.b), cell.c,
                                          o.generations, o.survival_replicas,
                                          cell_rng.substream(0), so);
        std::vector<double> first, last, height;
        for (std::size_t r = 0; r < o.walk_replicas; ++r) {
          RngStream s = cell_rng.substream(1).substream(r);
          RootedTree tree = tree_for_mean(cell.b, s.substream(0)());
          const RecurrenceProfile p = recurrence_diagnostic(tree, cell.c, o.checkpoints, s);
          if (p.checkpoints.empty()) continue;
          first.push_back(p.checkpoints.front().root_occupation);
          last.push_back(p.checkpoints.back().root_occupation);
          height.push_back(p.checkpoints.back().max_height);
        }
        cell.root_occupation_first = median(first);
        cell.root_occupation_last = median(last);
        cell.max_height_last = median(height);
        const double p = cell.survival->p_hat;
        switch (cell.classification.phase) {
          case Phase::transient: cell.agreement = p >= o.transient_min_survival; break;
          case Phase::recurrent: cell.agreement = p <= o.recurrent_max_survival; break;
          case Phase::critical: break;
        }
      } catch (const std::exception& e) {
        cell.error = e.what();
        cell.agreement.reset();
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

NullRecurrenceProbe run_null_recurrence_probe(const NullRecurrenceOptions& o,
                                              const RngStream& rng) {
  if (!(o.c > 0.0) || !(o.t >= o.c)) throw DomainError("need c > 0 and t >= c");
  if (!(o.b >= 1.0)) throw DomainError("need b >= 1");
  if (o.clock_budgets.empty() || !std::is_sorted(o.clock_budgets.begin(), o.clock_budgets.end())) {
    throw DomainError("clock budgets must be non-empty and increasing");
  }
  if (o.replicas < 1) throw DomainError("replicas must be >= 1");
  const double horizon = o.clock_budgets.back();

  // xi(t) per replica, or the clock reached when a budget stopped the run.
  std::vector<double> xi(o.replicas, 0.0);
  std::vector<char> stopped(o.replicas, 0);
  std::vector<char> event_hit(o.replicas, 0);
  parallel_for(o.replicas, [&](std::size_t r) {
    RngStream s = rng.substream(0).substream(r);
    RootedTree tree = tree_for_mean(o.b, s.substream(0)());
    RunOptions ro;
    ro.max_events = o.max_events;
    ro.max_clock = horizon;
    const RunResult res = run(tree, o.c, StopRule::root_local_time(o.t), s, ro);
    xi[r] = res.state.clock;
    if (res.reason == StopReason::budget_exceeded) {
      stopped[r] = 1;
      event_hit[r] = res.state.clock < horizon ? 1 : 0;
    }
  });

  NullRecurrenceProbe probe;
  for (char h : event_hit) probe.event_budget_hits += h;
  for (double budget : o.clock_budgets) {
    TruncatedMean tm;
    tm.budget = budget;
    for (std::size_t r = 0; r < o.replicas; ++r) {
      tm.value.add(std::min(xi[r], budget));
      if (stopped[r] || xi[r] > budget) ++tm.censored;
    }
    probe.ladder.push_back(tm);
  }

  const auto means = z_chain_means(o.t, o.c, o.generations, o.chain_replicas, rng.substream(1));
  for (int n = 0; n <= o.generations; ++n) {
    const double scale = std::pow(o.b, n);
    probe.generations.push_back({n, scale * (means[n].mean() - o.c),
                                 scale * means[n].stderr_of_mean(), scale * (o.t - o.c)});
  }
  return probe;
}

OffspringDistribution offspring_from(const ExperimentConfig& config, double default_b) {
  if (config.has("nu")) {
    try {
      return OffspringDistribution::parse(config.get_string("nu", ""));
    } catch (const DomainError& e) {
      throw ConfigError(std::string("bad offspring law: ") + e.what());
    }
  }
  const double b = config.get_double("b", default_b);
  if (!(b >= 1.0)) throw ConfigError("b must be >= 1");
  return OffspringDistribution::with_mean(b);
}

namespace {

// Command tags keep the streams of different commands apart for one seed.
enum : std::uint64_t {
  kTagSample = 1,
  kTagSimulate,
  kTagSurvival,
  kTagBarrier,
  kTagPhaseDiagram,
  kTagNullRecurrence,
};

std::string fmt(double x) { return format_double(x); }
std::string fmt(std::uint64_t x) { return std::to_string(x); }
std::string fmt_size(std::size_t x) { return std::to_string(x); }

AKernel kernel_from(const ExperimentConfig& cfg) {
  const std::string k = cfg.get_string("kernel", "mixture");
  if (k == "mixture") return AKernel::mixture;
  if (k == "event") return AKernel::event_driven;
  throw ConfigError("kernel must be 'mixture' or 'event'");
}

double positive(const ExperimentConfig& cfg, const std::string& key, double fallback) {
  const double v = cfg.get_double(key, fallback);
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("'" + key + "' must be positive");
  return v;
}

int positive_int(const ExperimentConfig& cfg, const std::string& key, int fallback) {
  const std::int64_t v = cfg.get_int(key, fallback);
  if (v < 1 || v > 1'000'000'000) throw ConfigError("'" + key + "' must be a positive integer");
  return static_cast<int>(v);
}

class Output {
 public:
  Output(const ExperimentConfig& cfg, RunSummary& summary) : cfg_(cfg), summary_(summary) {
    dir_ = cfg.output_path();
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir_.string());
  }

  std::ofstream open(const std::string& name) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (dir_ / name).string());
    summary_.files.push_back(name);
    return out;
  }

  void csv(const std::string& name, const Table& table) {
    auto out = open(name);
    write_csv(out, table, cfg_);
  }

 private:
  const ExperimentConfig& cfg_;
  RunSummary& summary_;
  fs::path dir_;
};

Table survival_table(const std::vector<SurvivalPoint>& points) {
  Table t{{"n", "survivors", "replicas", "p_hat", "stderr"}, {}};
  for (const SurvivalPoint& p : points) {
    t.add_row({std::to_string(p.n), fmt_size(p.survivors), fmt_size(p.replicas), fmt(p.p_hat),
               fmt(p.stderr)});
  }
  return t;
}

void cmd_mu(const ExperimentConfig& cfg, RunSummary& summary, Output& out) {
  const double c_min = positive(cfg, "c_min", 0.05);
  const double c_max = positive(cfg, "c_max", 5.0);
  const int steps = positive_int(cfg, "steps", 99);
  const Quadrature base = default_quadrature();
  const Quadrature q{positive(cfg, "quad_abs_tol", base.abs_tol),
                     positive(cfg, "quad_rel_tol", base.rel_tol),
                     positive_int(cfg, "quad_max_subdivisions", base.max_subdivisions)};
  out.csv("mu_curve.csv", mu_curve(c_min, c_max, steps, q));

  Table values{{"c", "method", "mu", "err_bound", "inverse_mu"}, {}};
  for (double c : cfg.get_doubles("c", {1.0})) {
    if (!(c > 0.0)) throw ConfigError("c must be positive");
    for (const MuValue& m : {mu_direct(c, q), mu_gaussian(c, q), mu_bessel(c, q)}) {
      values.add_row({fmt(c), to_string(m.method), fmt(m.mu), fmt(m.err_bound), fmt(1.0 / m.mu)});
      summary.add_metric(std::string("mu_") + to_string(m.method) + "(" + fmt(c) + ")", m.mu);
    }
  }
  out.csv("mu_values.csv", values);
}

void cmd_critical_c(const ExperimentConfig& cfg, RunSummary& summary, Output& out) {
  const double tol = positive(cfg, "tol", 1e-10);
  Table t{{"b", "c_critical", "mu", "b_mu"}, {}};
  for (double b : cfg.get_doubles("b", {2.0, 4.0})) {
    if (!(b > 1.0)) throw ConfigError("b must be > 1");
    const double c = critical_c(b, tol);
    const double mu = mu_direct(c).mu;
    t.add_row({fmt(b), fmt(c), fmt(mu), fmt(b * mu)});
    summary.add_metric("critical_c(" + fmt(b) + ")", c);
  }
  out.csv("critical_c.csv", t);
}

void cmd_sample(const ExperimentConfig& cfg, RunSummary& summary, Output& out, const RngStream& rng) {
  const std::string kind = cfg.get_string("kind", "A");
  const std::size_t n = cfg.get_count("replicas", 10'000);
  if (kind == "tree") {
    const OffspringDistribution nu = offspring_from(cfg, 2.0);
    const int depth = static_cast<int>(cfg.get_int("depth", 5));
    if (depth < 0) throw ConfigError("depth must be >= 0");
    Table t{{"replica", "vertices", "vertices_at_depth"}, {}};
    MeanAccumulator at_depth;
    for (std::size_t r = 0; r < n; ++r) {
      RootedTree tree = generate_gw(nu, depth, rng.substream(r)());
      const std::size_t last = tree.count_at_height(depth);
      at_depth.add(static_cast<double>(last));
      t.add_row({fmt_size(r), fmt_size(tree.size()), fmt_size(last)});
      if (r == 0) {
        auto f = out.open("tree.txt");
        tree.write_text(f);
      }
    }
    out.csv("samples.csv", t);
    summary.add_metric("vertices_at_depth", at_depth.mean(), at_depth.stderr_of_mean(), n);
    return;
  }
  const double c = positive(cfg, "c", 1.0);
  std::vector<double> values(n);
  std::vector<char> atom(n, 0);
  if (kind == "A") {
    const double t = cfg.get_double("t", 2.0);
    if (!(t >= c)) throw ConfigError("t must be >= c");
    const AKernel kernel = kernel_from(cfg);
    parallel_for(n, [&](std::size_t i) {
      RngStream s = rng.substream(i);
      const ASample a = sample_A(c, t, s, kernel);
      values[i] = a.value;
      atom[i] = a.hit_atom;
    });
  } else if (kind == "m_infinity") {
    parallel_for(n, [&](std::size_t i) {
      RngStream s = rng.substream(i);
      values[i] = sample_m_infinity(c, s);
    });
  } else {
    throw ConfigError("kind must be 'A', 'm_infinity' or 'tree'");
  }
  Table t{{"replica", "value", "hit_atom"}, {}};
  MeanAccumulator mean;
  std::size_t atoms = 0;
  for (std::size_t i = 0; i < n; ++i) {
    t.add_row({fmt_size(i), fmt(values[i]), atom[i] ? "1" : "0"});
    mean.add(values[i]);
    atoms += atom[i];
  }
  out.csv("samples.csv", t);
  summary.add_metric("mean", mean.mean(), mean.stderr_of_mean(), n);
  const double pa = static_cast<double>(atoms) / static_cast<double>(n);
  summary.add_metric("atom_fraction", pa, binomial_stderr(pa, n), n);
}

StopRule stop_from(const ExperimentConfig& cfg) {
  const std::string kind = cfg.get_string("stop", "hit_height");
  if (kind == "root_local_time") return StopRule::root_local_time(cfg.get_double("t", 3.0));
  if (kind == "hit_height") return StopRule::hit_height(positive_int(cfg, "n", 10));
  if (kind == "clock_budget") return StopRule::clock_budget(positive(cfg, "clock", 100.0));
  if (kind == "event_budget") {
    return StopRule::event_budget(static_cast<std::uint64_t>(positive_int(cfg, "events", 10'000)));
  }
  throw ConfigError("stop must be root_local_time, hit_height, clock_budget or event_budget");
}

void cmd_simulate(const ExperimentConfig& cfg, RunSummary& summary, Output& out,
                  const RngStream& rng) {
  const OffspringDistribution nu = offspring_from(cfg, 2.0);
  const double c = positive(cfg, "c", 1.0);
  const std::size_t n = cfg.get_count("replicas", 100);
  const StopRule stop = stop_from(cfg);
  if (stop.kind == StopKind::root_local_time && !(stop.value >= c)) {
    throw ConfigError("t must be >= c");
  }
  RunOptions ro;
  ro.max_events = cfg.get_uint64("max_events", 100'000'000);
  const bool trace = cfg.get_int("trace", 0) != 0;

  Table t{{"replica", "reason", "events", "clock", "root_local_time", "max_height",
           "vertices_touched"},
          {}};
  MeanAccumulator root_lt, height;
  std::size_t exceeded = 0;
  for (std::size_t r = 0; r < n; ++r) {
    RngStream s = rng.substream(r);
    RootedTree tree = nu.is_deterministic() ? regular_tree(nu.max_k()) : lazy_gw(nu, s.substream(0)());
    RunOptions opts = ro;
    std::ofstream trace_file;
    if (trace && r == 0) {
      trace_file = out.open("trace.csv");
      opts.trace = csv_trace_writer(trace_file);
    }
    const RunResult res = run(tree, c, stop, s, opts);
    const bool fired = res.reason == StopReason::rule_fired;
    exceeded += fired ? 0 : 1;
    const double lt = res.state.local_time(tree.root(), c);
    root_lt.add(lt);
    height.add(res.state.max_height);
    t.add_row({fmt_size(r), fired ? "rule_fired" : "budget_exceeded", fmt(res.state.events),
               fmt(res.state.clock), fmt(lt), std::to_string(res.state.max_height),
               fmt_size(tree.size())});
  }
  out.csv("runs.csv", t);
  summary.add_metric("root_local_time", root_lt.mean(), root_lt.stderr_of_mean(), n);
  summary.add_metric("max_height", height.mean(), height.stderr_of_mean(), n);
  if (exceeded) {
    summary.warnings.push_back(fmt_size(exceeded) + " runs hit the event budget");
  }
}

void cmd_survival(const ExperimentConfig& cfg, RunSummary& summary, Output& out,
                  const RngStream& rng) {
  const OffspringDistribution nu = offspring_from(cfg, 2.0);
  const double c = positive(cfg, "c", 1.0);
  const double x0 = cfg.get_double("x0", 10.0);
  if (!(x0 >= c)) throw ConfigError("x0 must be >= c");
  const int generations = positive_int(cfg, "generations", 25);
  const std::size_t n = cfg.get_count("replicas", 1000);
  SurvivalOptions so;
  so.eta = cfg.get_double("eta", 0.0);
  if (!(so.eta >= 0.0 && so.eta <= 1.0)) throw ConfigError("eta must be in [0, 1]");
  so.population_cap = cfg.get_count("population_cap", 1'000'000);
  so.kernel = kernel_from(cfg);
  const SurvivalEstimate est = estimate_survival(x0, nu, c, generations, n, rng, so);
  out.csv("survival.csv", survival_table(est.curve));
  summary.add_metric("p_hat", est.p_hat, est.stderr, n);
  summary.add_metric("cap_hits", static_cast<double>(est.cap_hits), std::nullopt, n);
  if (est.cap_hits) {
    summary.warnings.push_back(fmt_size(est.cap_hits) +
                               " replicas hit the population cap and count as surviving");
  }
  summary.add_label("phase", nu.mean() > 1.0 ? to_string(classify(nu.mean(), c)) : "recurrent");
}

void cmd_barrier(const ExperimentConfig& cfg, RunSummary& summary, Output& out,
                 const RngStream& rng) {
  const double c = positive(cfg, "c", 1.0);
  const double x = cfg.get_double("x", std::log(50.0));
  BarrierOptions bo;
  bo.n_min = positive_int(cfg, "n_min", bo.n_min);
  bo.n_max = positive_int(cfg, "n_max", bo.n_max);
  if (bo.n_max <= bo.n_min) throw ConfigError("n_max must exceed n_min");
  bo.replicas = cfg.get_count("replicas", bo.replicas);
  bo.bootstrap_resamples = positive_int(cfg, "bootstrap", bo.bootstrap_resamples);
  bo.confidence = cfg.get_double("confidence", bo.confidence);
  if (!(bo.confidence > 0.0 && bo.confidence < 1.0)) throw ConfigError("confidence in (0, 1)");
  bo.prefactor_exponent = cfg.get_double("prefactor_exponent", bo.prefactor_exponent);
  bo.min_survivors = cfg.get_count("min_survivors", bo.min_survivors);
  const std::string mode = cfg.get_string("mode", "y_chain");
  if (mode == "y_chain") {
    bo.mode = BarrierMode::y_chain;
  } else if (mode == "iid") {
    bo.mode = BarrierMode::iid_control;
  } else {
    throw ConfigError("mode must be 'y_chain' or 'iid'");
  }
  const BarrierResult res = barrier_exponent(c, x, bo, rng);
  out.csv("barrier.csv", survival_table(res.table));
  summary.add_label("supermultiplicative", res.supermultiplicative() ? "yes" : "no");
  if (res.status == BarrierStatus::insufficient_data) {
    summary.add_label("status", "insufficient_data");
    summary.warnings.push_back("fewer than min_survivors paths survive to n_max");
    return;
  }
  summary.add_label("status", "ok");
  summary.add_metric("rate", res.rate, std::nullopt, bo.replicas);
  summary.add_metric("rate_ci_lo", res.ci_lo, std::nullopt, bo.replicas);
  summary.add_metric("rate_ci_hi", res.ci_hi, std::nullopt, bo.replicas);
  summary.add_metric("mu", mu_direct(c).mu);
}

void cmd_phase_diagram(const ExperimentConfig& cfg, RunSummary& summary, Output& out,
                       const RngStream& rng) {
  PhaseDiagramOptions o;
  o.b_values = cfg.get_doubles("b", o.b_values);
  o.c_values = cfg.get_doubles("c", o.c_values);
  o.tol = positive(cfg, "tol", o.tol);
  o.x0 = cfg.get_double("x0", o.x0);
  o.generations = positive_int(cfg, "generations", o.generations);
  o.survival_replicas = cfg.get_count("replicas", o.survival_replicas);
  o.population_cap = cfg.get_count("population_cap", o.population_cap);
  o.walk_replicas = cfg.get_count("walk_replicas", o.walk_replicas);
  o.transient_min_survival = cfg.get_double("transient_min_survival", o.transient_min_survival);
  o.recurrent_max_survival = cfg.get_double("recurrent_max_survival", o.recurrent_max_survival);
  if (cfg.has("checkpoints")) {
    o.checkpoints.clear();
    for (double v : cfg.get_doubles("checkpoints", {})) {
      if (!(v >= 1.0)) throw ConfigError("checkpoints must be >= 1");
      o.checkpoints.push_back(static_cast<std::uint64_t>(v));
    }
    if (!std::is_sorted(o.checkpoints.begin(), o.checkpoints.end())) {
      throw ConfigError("checkpoints must be increasing");
    }
  }
  const auto cells = run_phase_diagram(o, rng);
  Table t{{"b", "c", "b_mu", "classification", "p_hat", "stderr", "cap_hits",
           "root_occupation_first", "root_occupation_last", "max_height_last", "agreement",
           "error"},
          {}};
  std::size_t disagreements = 0;
  for (const PhaseCell& cell : cells) {
    const bool ok = cell.error.empty();
    std::string agreement = "n/a";
    if (cell.agreement) agreement = *cell.agreement ? "yes" : "no";
    if (cell.agreement && !*cell.agreement) ++disagreements;
    t.add_row({fmt(cell.b), fmt(cell.c), ok ? fmt(cell.classification.b_mu) : "",
               ok ? to_string(cell.classification.phase) : "",
               cell.survival ? fmt(cell.survival->p_hat) : "",
               cell.survival ? fmt(cell.survival->stderr) : "",
               cell.survival ? fmt_size(cell.survival->cap_hits) : "",
               fmt(cell.root_occupation_first), fmt(cell.root_occupation_last),
               fmt(cell.max_height_last), agreement, cell.error});
    if (!ok) summary.warnings.push_back("cell b=" + fmt(cell.b) + " c=" + fmt(cell.c) + ": " + cell.error);
  }
  out.csv("phase_diagram.csv", t);
  summary.add_metric("cells", static_cast<double>(cells.size()));
  summary.add_metric("disagreements", static_cast<double>(disagreements));
  summary.add_label("critical_band",
                    "cells with |b mu(c) - 1| <= tol; b mu(c) = 1 exactly is recurrent");
}

void cmd_null_recurrence(const ExperimentConfig& cfg, RunSummary& summary, Output& out,
                         const RngStream& rng) {
  NullRecurrenceOptions o;
  o.b = cfg.get_double("b", o.b);
  if (!(o.b >= 1.0)) throw ConfigError("b must be >= 1");
  o.c = positive(cfg, "c", o.c);
  o.t = cfg.get_double("t", o.t);
  if (!(o.t >= o.c)) throw ConfigError("t must be >= c");
  o.replicas = cfg.get_count("replicas", o.replicas);
  o.clock_budgets = cfg.get_doubles("budgets", o.clock_budgets);
  o.max_events = cfg.get_uint64("max_events", o.max_events);
  o.generations = positive_int(cfg, "generations", o.generations);
  o.chain_replicas = cfg.get_count("chain_replicas", o.chain_replicas);
  for (double v : o.clock_budgets) {
    if (!(v > 0.0)) throw ConfigError("budgets must be positive");
  }
  if (!std::is_sorted(o.clock_budgets.begin(), o.clock_budgets.end())) {
    throw ConfigError("budgets must be increasing");
  }
  const NullRecurrenceProbe probe = run_null_recurrence_probe(o, rng);
  Table ladder{{"budget", "mean_truncated_xi", "stderr", "replicas", "censored"}, {}};
  for (const TruncatedMean& tm : probe.ladder) {
    ladder.add_row({fmt(tm.budget), fmt(tm.value.mean()), fmt(tm.value.stderr_of_mean()),
                    fmt_size(tm.value.count()), fmt_size(tm.censored)});
  }
  out.csv("null_recurrence.csv", ladder);
  Table gens{{"n", "contribution", "stderr", "expected"}, {}};
  for (const GenerationContribution& g : probe.generations) {
    gens.add_row({std::to_string(g.n), fmt(g.estimate), fmt(g.stderr), fmt(g.expected)});
  }
  out.csv("generation_contributions.csv", gens);
  const TruncatedMean& top = probe.ladder.back();
  summary.add_metric("mean_truncated_xi", top.value.mean(), top.value.stderr_of_mean(),
                     top.value.count());
  if (probe.event_budget_hits) {
    summary.warnings.push_back(fmt_size(probe.event_budget_hits) +
                               " runs hit the event budget before the clock horizon");
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

const std::vector<std::string>& experiment_commands() {
  static const std::vector<std::string> names{"mu",     "critical-c",    "sample",
                                              "simulate", "survival",    "barrier",
                                              "phase-diagram", "null-recurrence"};
  return names;
}

RunSummary run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const std::string& cmd = config.command();
  RunSummary summary;
  summary.config = config;
  // The output location is not part of the experiment.
  summary.config.erase("out");
  Output out(config, summary);
  const std::uint64_t seed = config.seed();

  bool insufficient = false;
  if (cmd == "mu") {
    cmd_mu(config, summary, out);
  } else if (cmd == "critical-c") {
    cmd_critical_c(config, summary, out);
  } else if (cmd == "sample") {
    cmd_sample(config, summary, out, RngStream(seed, {kTagSample}));
  } else if (cmd == "simulate") {
    cmd_simulate(config, summary, out, RngStream(seed, {kTagSimulate}));
  } else if (cmd == "survival") {
    cmd_survival(config, summary, out, RngStream(seed, {kTagSurvival}));
  } else if (cmd == "barrier") {
    cmd_barrier(config, summary, out, RngStream(seed, {kTagBarrier}));
    for (const auto& [k, v] : summary.labels) insufficient |= k == "status" && v == "insufficient_data";
  } else if (cmd == "phase-diagram") {
    cmd_phase_diagram(config, summary, out, RngStream(seed, {kTagPhaseDiagram}));
  } else if (cmd == "null-recurrence") {
    cmd_null_recurrence(config, summary, out, RngStream(seed, {kTagNullRecurrence}));
  } else {
    throw ConfigError("unknown command '" + cmd + "'");
  }

  {
    auto f = out.open("config.txt");
    f << summary.config.to_text();
  }
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  summary.timestamp = utc_timestamp();
  {
    auto f = out.open("summary.json");
    f << to_json(summary);
  }
  if (insufficient) throw InsufficientData("barrier fit: too few surviving paths at n_max");
  return summary;
}

}  // namespace vrjp
