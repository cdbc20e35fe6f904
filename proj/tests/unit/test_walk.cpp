#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "helpers.hpp"
#include "vrjp/branching.hpp"
#include "vrjp/errors.hpp"
#include "vrjp/scalar_math.hpp"
#include "vrjp/stats.hpp"
#include "vrjp/walk.hpp"

using namespace vrjp;

TEST_CASE("first holding at a root with one child is Exp(c)") {
  const RngStream base(1);
  MeanAccumulator hold;
  for (std::size_t r = 0; r < 100000; ++r) {
    RootedTree path = regular_tree(1);
    WalkState s = start_walk();
    RngStream rng = base.substream(r);
    step(s, path, 1.0, rng);
    REQUIRE(s.current == 1);
    hold.add(s.clock);
  }
  CHECK(within_se(hold.mean(), 1.0, hold.stderr_of_mean()));
}

TEST_CASE("two fresh children are chosen uniformly") {
  const RngStream base(2);
  std::size_t first = 0;
  const std::size_t n = 100000;
  for (std::size_t r = 0; r < n; ++r) {
    RootedTree tree = regular_tree(2);
    WalkState s = start_walk();
    RngStream rng = base.substream(r);
    step(s, tree, 1.0, rng);
    first += s.current == 1;
  }
  CHECK(within_se(first / double(n), 0.5, binomial_se(0.5, n)));
}

TEST_CASE("jump probabilities proportional to local times") {
  // Children with occupation 0 and 3, c = 1: rate fields 1 and 4.
  const RngStream base(3);
  const std::size_t n = 100000;
  std::size_t to_second = 0;
  MeanAccumulator hold;
  for (std::size_t r = 0; r < n; ++r) {
    RootedTree tree = regular_tree(2, 1);
    WalkState s = start_walk();
    s.occupation.assign(3, 0.0);
    s.visits.assign(3, 0);
    s.occupation[2] = 3.0;
    RngStream rng = base.substream(r);
    step(s, tree, 1.0, rng);
    to_second += s.current == 2;
    hold.add(s.clock);
  }
  CHECK(within_se(to_second / double(n), 0.8, binomial_se(0.8, n)));
  CHECK(within_se(hold.mean(), 0.2, hold.stderr_of_mean()));
}

TEST_CASE("isolated vertex is a structural error") {
  RootedTree lone = regular_tree(2, 0);
  WalkState s = start_walk();
  RngStream rng(4);
  CHECK_THROWS_AS(step(s, lone, 1.0, rng), StructuralError);
}

TEST_CASE("leaves send the walk back to the parent") {
  RootedTree tree = regular_tree(1, 1);
  RngStream rng(5);
  const RunResult r = run(tree, 1.0, StopRule::event_budget(1000), rng);
  CHECK(r.state.events == 1000);
  CHECK(r.state.current == 0);  // even number of jumps on a single edge
}

TEST_CASE("stop rules") {
  RngStream rng(6);
  {
    RootedTree tree = regular_tree(3);
    const RunResult r = run(tree, 1.0, StopRule::hit_height(1), rng);
    CHECK(r.reason == StopReason::rule_fired);
    CHECK(tree.height(r.state.current) == 1);
    CHECK(r.state.occupation_at(0) > 0.0);
  }
  {
    RootedTree tree = regular_tree(2);
    const RunResult r = run(tree, 1.0, StopRule::root_local_time(1.0), rng);
    CHECK(r.state.events == 0);
    CHECK(r.state.clock == 0.0);
  }
  {
    RootedTree tree = regular_tree(2, 3);
    const RunResult r = run(tree, 0.5, StopRule::root_local_time(4.0), rng);
    CHECK(r.reason == StopReason::rule_fired);
    CHECK(r.state.current == 0);
    CHECK(r.state.local_time(0, 0.5) == 4.0);
  }
  {
    RootedTree tree = regular_tree(2);
    const RunResult r = run(tree, 1.0, StopRule::clock_budget(7.5), rng);
    CHECK(r.state.clock == 7.5);
  }
  {
    RootedTree tree = regular_tree(2);
    RunOptions o;
    o.max_events = 50;
    const RunResult r = run(tree, 1.0, StopRule::hit_height(1000), rng, o);
    CHECK(r.reason == StopReason::budget_exceeded);
    CHECK(r.state.events == 50);
  }
  {
    RootedTree tree = regular_tree(2);
    RunOptions o;
    o.max_clock = 3.0;
    const RunResult r = run(tree, 0.2, StopRule::hit_height(1000), rng, o);
    CHECK(r.reason == StopReason::budget_exceeded);
    CHECK(r.state.clock == 3.0);
  }
  RootedTree tree = regular_tree(2);
  CHECK_THROWS_AS(run(tree, 1.0, StopRule::root_local_time(0.5), rng), DomainError);
  CHECK_THROWS_AS(run(tree, 0.0, StopRule::hit_height(2), rng), DomainError);
  CHECK_THROWS_AS(run(tree, 1.0, StopRule::hit_height(0), rng), DomainError);
}

TEST_CASE("clock conservation and visited support on random configurations") {
  RngStream gen(7);
  for (int trial = 0; trial < 100; ++trial) {
    const double c = 0.05 + 2.0 * gen.uniform();
    const auto law = OffspringDistribution::parse(gen.uniform() < 0.5 ? "1:0.5,3:0.5" : "1:0.3,2:0.7");
    RootedTree tree = lazy_gw(law, trial);
    RngStream rng = gen.substream(trial);
    const auto events = static_cast<std::uint64_t>(1 + gen.uniform() * 5000);
    const RunResult r = run(tree, c, StopRule::event_budget(events), rng);
    const WalkState& s = r.state;
    CHECK(std::abs(s.total_occupation() - s.clock) <= 1e-9 * std::max(1.0, s.clock));
    for (VertexId v = 1; v < s.occupation.size(); ++v) {
      if (s.occupation[v] > 0.0) CHECK(s.visits_at(v) > 0);
    }
  }
}

TEST_CASE("determinism") {
  for (int rep = 0; rep < 2; ++rep) {
    std::ostringstream a, b;
    {
      RootedTree tree = lazy_gw(OffspringDistribution::parse("1:0.5,2:0.5"), 3);
      RngStream rng(8);
      RunOptions o;
      o.trace = csv_trace_writer(a);
      run(tree, 0.7, StopRule::event_budget(2000), rng, o);
    }
    {
      RootedTree tree = lazy_gw(OffspringDistribution::parse("1:0.5,2:0.5"), 3);
      RngStream rng(8);
      RunOptions o;
      o.trace = csv_trace_writer(b);
      run(tree, 0.7, StopRule::event_budget(2000), rng, o);
    }
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("event_index,clock,vertex_height,root_occupation\n", 0) == 0);
  }
}

TEST_CASE("local times along a path follow the Z chain") {
  // Finite path 0-1-2-3 (recurrent, so xi(t) is finite): the local times
  // at xi(t) match the chain Z started from t.
  const double c = 1.0, t = 2.0;
  const std::size_t n = 50000;
  std::vector<std::vector<double>> walk(3), chain(3);
  const RngStream wr(9), cr(10);
  for (std::size_t r = 0; r < n; ++r) {
    RootedTree path = regular_tree(1, 3);
    RngStream s = wr.substream(r);
    const RunResult res = run(path, c, StopRule::root_local_time(t), s);
    REQUIRE(res.reason == StopReason::rule_fired);
    for (VertexId k = 1; k <= 3; ++k) walk[k - 1].push_back(res.state.local_time(k, c));
    RngStream z = cr.substream(r);
    double x = t;
    for (int k = 0; k < 3; ++k) {
      x = z_step(x, c, z);
      chain[k].push_back(x);
    }
  }
  for (int k = 0; k < 3; ++k) {
    CAPTURE(k);
    CHECK(ks_two_sample(walk[k], chain[k]) < 0.02);
  }
}

TEST_CASE("G_1 is c plus an Exp(deg c) holding") {
  for (std::uint32_t b : {1u, 3u}) {
    const double c = 0.8;
    RootedTree tree = regular_tree(b);
    const GnExperiment g = g_n_experiment(tree, c, 1, 20000, RngStream(11));
    std::vector<double> samples = g.samples;
    const double rate = b * c;
    CHECK(ks_one_sample(samples, [&](double x) { return x <= c ? 0.0 : 1.0 - std::exp(-rate * (x - c)); }) <
          0.02);
  }
}

TEST_CASE("G_n bound") {
  for (int n : {4, 6, 8}) {
    RootedTree tree = regular_tree(4);
    const GnExperiment g = g_n_experiment(tree, 1.0, n, 2000, RngStream(12));
    CHECK(g.vertices_at_n == static_cast<std::size_t>(std::pow(4, n)));
    CHECK(g.bound(1.05) > 1.0);
    CHECK(g.empirical_below(1.05) <= g.bound(1.05));
    CHECK(g.budget_exceeded == 0);
  }
  RootedTree path = regular_tree(1);
  const GnExperiment g = g_n_experiment(path, 1.0, 6, 5000, RngStream(13));
  const double p = g.empirical_below(1.2);
  CHECK(g.bound(1.2) == doctest::Approx(std::pow(mu_direct(1.0).mu * std::sqrt(1.2), 6)));
  CHECK(p <= g.bound(1.2) + 4 * binomial_se(p, g.samples.size()));
}

TEST_CASE("recurrence diagnostic profiles") {
  const std::vector<std::uint64_t> checkpoints{1000, 10000, 100000};
  auto medians = [&](double c, std::uint32_t b) {
    std::vector<double> first, last, h_first, h_last;
    for (std::uint64_t r = 0; r < 5; ++r) {
      RootedTree tree = regular_tree(b);
      RngStream rng(14, {r});
      const RecurrenceProfile p = recurrence_diagnostic(tree, c, checkpoints, rng);
      REQUIRE(p.checkpoints.size() == 3);
      first.push_back(p.checkpoints.front().root_occupation);
      last.push_back(p.checkpoints.back().root_occupation);
      h_first.push_back(p.checkpoints.front().max_height);
      h_last.push_back(p.checkpoints.back().max_height);
    }
    return std::array<double, 4>{quantile(first, 0.5), quantile(last, 0.5), quantile(h_first, 0.5),
                                 quantile(h_last, 0.5)};
  };
  // Transient: root occupation plateaus, height grows with the events.
  const auto tr = medians(1.0, 2);
  CHECK(tr[1] < 1.1 * tr[0]);
  CHECK(tr[3] > 10 * tr[2]);
  // Recurrent (2 mu(0.1) < 1): root occupation keeps growing.
  CHECK(2 * mu_direct(0.1).mu < 1.0);
  const auto rec = medians(0.1, 2);
  CHECK(rec[1] > 3 * rec[0]);
  // Half-line: root occupation grows without bound.
  const auto line = medians(1.0, 1);
  CHECK(line[1] > 3 * line[0]);
  RootedTree tree = regular_tree(2);
  RngStream rng(15);
  CHECK_THROWS_AS(recurrence_diagnostic(tree, 1.0, {10, 5}, rng), DomainError);
}
