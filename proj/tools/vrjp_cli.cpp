// Command-line front end: every subcommand fills an ExperimentConfig and
// hands it to run_experiment().

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vrjp/config.hpp"
#include "vrjp/errors.hpp"
#include "vrjp/experiments.hpp"
#include "vrjp/report.hpp"

namespace {

enum ExitCode { kOk = 0, kUnexpected = 1, kConfigError = 2, kNumericalFailure = 3, kInsufficientData = 4 };

struct Command {
  const char* name;
  const char* help;
  std::vector<std::pair<const char*, const char*>> keys;
};

const std::vector<Command>& commands() {
  static const std::vector<Command> table{
      {"mu", "mu(c) curve and per-method values",
       {{"c", "comma-separated c values for the method table"},
        {"c_min", "curve start"},
        {"c_max", "curve end"},
        {"steps", "curve intervals"},
        {"quad_abs_tol", "quadrature absolute tolerance"},
        {"quad_rel_tol", "quadrature relative tolerance"},
        {"quad_max_subdivisions", "quadrature panel budget"}}},
      {"critical-c", "c with b mu(c) = 1", {{"b", "comma-separated b values"}, {"tol", "bisection tolerance"}}},
      {"sample", "draws of A_c(t), m_c(inf) or Galton-Watson trees",
       {{"kind", "A | m_infinity | tree"},
        {"c", "c"},
        {"t", "t for kind=A"},
        {"kernel", "mixture | event"},
        {"nu", "offspring law k:p,..."},
        {"b", "offspring mean"},
        {"depth", "tree depth"}}},
      {"simulate", "VRJP(c) runs on a tree",
       {{"c", "c"},
        {"nu", "offspring law k:p,..."},
        {"b", "offspring mean"},
        {"stop", "root_local_time | hit_height | clock_budget | event_budget"},
        {"t", "root local time target"},
        {"n", "height target"},
        {"clock", "clock budget"},
        {"events", "event budget"},
        {"max_events", "hard event cap"},
        {"trace", "1 writes trace.csv for replica 0"}}},
      {"survival", "survival of the branching chain F",
       {{"c", "c"},
        {"nu", "offspring law k:p,..."},
        {"b", "offspring mean"},
        {"x0", "start position"},
        {"generations", "horizon"},
        {"eta", "percolation probability"},
        {"population_cap", "alive-particle cap"},
        {"kernel", "mixture | event"}}},
      {"barrier", "decay rate of P{tau_x > n}",
       {{"c", "c"},
        {"x", "barrier (log scale)"},
        {"mode", "y_chain | iid"},
        {"n_min", "fit window start"},
        {"n_max", "fit window end"},
        {"bootstrap", "bootstrap resamples"},
        {"confidence", "interval level"},
        {"prefactor_exponent", "kappa in the n^-kappa prefactor"},
        {"min_survivors", "minimum survivors at n_max"}}},
      {"phase-diagram", "classification against simulation over a (b, c) grid",
       {{"b", "comma-separated b values"},
        {"c", "comma-separated c values"},
        {"tol", "critical band half-width"},
        {"x0", "survival start"},
        {"generations", "survival horizon"},
        {"population_cap", "alive-particle cap"},
        {"walk_replicas", "walks per cell"},
        {"checkpoints", "comma-separated event checkpoints"},
        {"transient_min_survival", "agreement threshold, transient cells"},
        {"recurrent_max_survival", "agreement threshold, recurrent cells"}}},
      {"null-recurrence", "truncated means of xi(t) and per-generation contributions",
       {{"b", "tree degree (1 = half-line)"},
        {"c", "c"},
        {"t", "root local time target"},
        {"budgets", "comma-separated clock budgets"},
        {"max_events", "hard event cap per run"},
        {"generations", "generations for b^n (E[Z_n] - c)"},
        {"chain_replicas", "replicas for E[Z_n]"}}},
  };
  return table;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VRJP(c) on Galton-Watson trees: numerics and simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", vrjp::tool_version());

  std::string config_file;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string replicas;
  std::vector<std::string> overrides;
  std::map<std::string, std::string> values;

  for (const Command& cmd : commands()) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", config_file, "key = value file; flags override it");
    sub->add_option("--seed", seed, "master seed")->capture_default_str();
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--replicas", replicas, "number of replicas");
    sub->add_option("--set", overrides, "extra key=value settings");
    for (const auto& [key, help] : cmd.keys) {
      std::string flag = std::string("--") + key;
      for (char& ch : flag) {
        if (ch == '_') ch = '-';
      }
      sub->add_option(flag, values[std::string(cmd.name) + "/" + key], help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    vrjp::ExperimentConfig cfg =
        config_file.empty() ? vrjp::ExperimentConfig(name) : vrjp::ExperimentConfig::load(config_file);
    cfg.set("command", name);
    if (config_file.empty() || sub->count("--seed")) cfg.set("seed", seed);
    if (config_file.empty() || sub->count("--out")) cfg.set("out", out_dir);
    if (!replicas.empty()) cfg.set("replicas", replicas);
    for (const Command& cmd : commands()) {
      if (name != cmd.name) continue;
      for (const auto& [key, help] : cmd.keys) {
        const std::string& v = values[name + "/" + key];
        if (!v.empty()) cfg.set(key, v);
      }
    }
    for (const std::string& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw vrjp::ConfigError("--set expects key=value, got " + kv);
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    const vrjp::RunSummary summary = vrjp::run_experiment(cfg);
    std::cout << vrjp::to_json(summary);
    return kOk;
  } catch (const vrjp::InsufficientData& e) {
    std::cerr << "insufficient data: " << e.what() << "\n";
    return kInsufficientData;
  } catch (const vrjp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const vrjp::DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const vrjp::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << " (partial estimate " << e.partial_estimate()
              << ", error " << e.error_estimate() << ")\n";
    return kNumericalFailure;
  } catch (const vrjp::RangeError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUnexpected;
  }
}
