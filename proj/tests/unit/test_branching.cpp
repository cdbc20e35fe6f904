#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "vrjp/branching.hpp"
#include "vrjp/errors.hpp"
#include "vrjp/scalar_math.hpp"

using namespace vrjp;

namespace {

const OffspringDistribution kBinary = OffspringDistribution::deterministic(2);

}  // namespace

TEST_CASE("z_step absorbs at c and preserves the mean") {
  RngStream rng(1);
  CHECK(z_step(1.0, 1.0, rng) == 1.0);
  MeanAccumulator acc;
  for (int i = 0; i < 100000; ++i) acc.add(z_step(3.0, 1.0, rng));
  CHECK(std::abs(acc.mean() - 3.0) < 0.03);
  CHECK(within_se(acc.mean(), 3.0, acc.stderr_of_mean()));
}

TEST_CASE("Z is absorbed at c in the long run") {
  const std::size_t n = 20000;
  std::vector<double> z(n, 5.0);
  RngStream rng(2);
  std::vector<double> alive_frac;
  for (int step = 1; step <= 200; ++step) {
    std::size_t alive = 0;
    for (double& x : z) {
      x = z_step(x, 1.0, rng);
      alive += x > 1.01;
    }
    if (step % 50 == 0) alive_frac.push_back(alive / double(n));
  }
  for (std::size_t i = 1; i < alive_frac.size(); ++i) CHECK(alive_frac[i] <= alive_frac[i - 1]);
  CHECK(alive_frac.back() < 0.1);
}

TEST_CASE("z_chain_means stay at Z_0") {
  const auto means = z_chain_means(2.5, 1.0, 5, 100000, RngStream(3));
  REQUIRE(means.size() == 6);
  for (const auto& m : means) CHECK(within_se(m.mean(), 2.5, m.stderr_of_mean()));
}

TEST_CASE("absorbed particles stay absorbed without randomness") {
  ParticleFront f;
  f.c = 1.0;
  f.absorbed = 3;
  RngStream rng(4), untouched(4);
  const EvolveResult r = f_evolve(f, kBinary, 1.0, rng);
  CHECK(r.status == EvolveStatus::ok);
  CHECK(r.front.alive.empty());
  CHECK(r.front.absorbed == 6);
  CHECK(r.front.died_out());
  CHECK(r.front.generation == 1);
  CHECK(rng() == untouched());

  // Random offspring: the absorbed count is still exactly the child total.
  const auto law = OffspringDistribution::parse("0:0.5,3:0.5");
  ParticleFront g;
  g.c = 1.0;
  g.absorbed = 1000;
  MeanAccumulator total;
  for (int i = 0; i < 2000; ++i) {
    const EvolveResult e = f_evolve(g, law, 1.0, rng);
    CHECK(e.front.alive.empty());
    CHECK(e.front.absorbed % 3 == 0);
    total.add(static_cast<double>(e.front.absorbed));
  }
  CHECK(within_se(total.mean(), 1500.0, total.stderr_of_mean()));
}

TEST_CASE("absorbed counts saturate instead of wrapping") {
  ParticleFront f;
  f.c = 1.0;
  f.absorbed = std::numeric_limits<std::uint64_t>::max() / 2 + 10;
  RngStream rng(5);
  const EvolveResult r = f_evolve(f, kBinary, 1.0, rng);
  CHECK(r.front.absorbed == std::numeric_limits<std::uint64_t>::max());
  CHECK(r.front.absorbed_saturated);
}

TEST_CASE("children of one particle are independent A_c(x) draws") {
  const double x = 3.0, c = 1.0;
  const std::size_t n = 100000;
  std::vector<double> first, second, direct;
  const RngStream base(6), other(7);
  MeanAccumulator alive_children;
  for (std::size_t r = 0; r < n; ++r) {
    RngStream s = base.substream(r);
    const EvolveResult e = f_evolve(ParticleFront::single(x, c), kBinary, c, s);
    std::vector<double> pos = e.front.alive;
    pos.resize(2, c);  // absorbed children sit at c
    first.push_back(pos[0]);
    second.push_back(pos[1]);
    alive_children.add(static_cast<double>(e.front.alive_count()));
    RngStream t = other.substream(r);
    direct.push_back(sample_A(c, x, t).value);
  }
  // Positions of alive children precede the absorbed ones, so compare the
  // pooled marginal.
  std::vector<double> pooled = first;
  pooled.insert(pooled.end(), second.begin(), second.end());
  CHECK(ks_two_sample(pooled, direct) < 0.02);
  CHECK(within_se(alive_children.mean(), 2.0 * (1.0 - std::exp(-c * (x - c))),
                  alive_children.stderr_of_mean()));
}

TEST_CASE("population cap") {
  RngStream rng(8);
  ParticleFront f = ParticleFront::single(50.0, 1.0);
  EvolveResult r{f, EvolveStatus::ok};
  const auto law = OffspringDistribution::deterministic(10);
  for (int g = 0; g < 5 && r.status == EvolveStatus::ok; ++g) r = f_evolve(r.front, law, 1.0, rng, 500);
  CHECK(r.status == EvolveStatus::population_cap);
  SurvivalOptions o;
  o.population_cap = 500;
  const auto counts = alive_counts(50.0, law, 1.0, 6, rng, o);
  CHECK(counts.back() == std::numeric_limits<std::uint64_t>::max());
}

TEST_CASE("count_in_interval") {
  ParticleFront f;
  f.c = 1.0;
  f.alive = {2.0, 3.5};
  f.absorbed = 1;
  CHECK(count_in_interval(f, Interval{2.0, 3.0}) == 1);
  CHECK(count_in_interval(f, Interval{1.0}) == 3);
  CHECK(count_in_interval(f, Interval{2.5, 2.5, true, false}) == 0);
  CHECK(count_in_interval(f, Interval{2.0, 2.0, false, true}) == 0);
  CHECK(count_in_interval(f, Interval{0.5, 1.0}) == 1);
  CHECK_THROWS_AS(count_in_interval(f, Interval{3.0, 2.0}), DomainError);
}

TEST_CASE("absorption is absorbing along replicas") {
  const RngStream base(9);
  for (std::size_t r = 0; r < 300; ++r) {
    RngStream s = base.substream(r);
    ParticleFront f = ParticleFront::single(2.0, 1.0);
    bool dead = false;
    for (int g = 0; g < 15; ++g) {
      const EvolveResult e = f_evolve(f, kBinary, 1.0, s, 100000);
      REQUIRE(e.status == EvolveStatus::ok);
      f = e.front;
      if (dead) REQUIRE(f.died_out());
      dead = f.died_out();
    }
  }
}

TEST_CASE("population and position means") {
  // E[#particles at n] = b^n and E[sum of positions at n] = b^n x0.
  const double x0 = 3.0, c = 1.0;
  const auto law = OffspringDistribution::parse("1:0.5,3:0.5");
  const RngStream base(10);
  std::vector<MeanAccumulator> count(6), position(6);
  for (std::size_t r = 0; r < 20000; ++r) {
    RngStream s = base.substream(r);
    ParticleFront f = ParticleFront::single(x0, c);
    for (int g = 1; g <= 5; ++g) {
      f = f_evolve(f, law, c, s).front;
      double sum = c * static_cast<double>(f.absorbed);
      for (double x : f.alive) sum += x;
      count[g].add(f.total_count() / std::pow(2.0, g));
      position[g].add(sum / std::pow(2.0, g));
    }
  }
  for (int g = 1; g <= 5; ++g) {
    CAPTURE(g);
    CHECK(within_se(count[g].mean(), 1.0, count[g].stderr_of_mean()));
    CHECK(within_se(position[g].mean(), x0, position[g].stderr_of_mean()));
  }
}

TEST_CASE("survival: absorbed start and argument checks") {
  const auto est = estimate_survival(1.0, kBinary, 1.0, 5, 100, RngStream(11));
  CHECK(est.p_hat == 0.0);
  CHECK(est.curve.size() == 5);
  CHECK_THROWS_AS(estimate_survival(0.5, kBinary, 1.0, 5, 100, RngStream(11)), DomainError);
  CHECK_THROWS_AS(estimate_survival(2.0, kBinary, 1.0, 0, 100, RngStream(11)), DomainError);
  CHECK_THROWS_AS(estimate_survival(2.0, kBinary, 1.0, 5, 0, RngStream(11)), DomainError);
}

TEST_CASE("survival on both sides of the transition") {
  SurvivalOptions o;
  o.population_cap = 20000;
  const auto transient = estimate_survival(10.0, kBinary, 1.0, 25, 200, RngStream(12), o);
  CHECK(transient.p_hat >= 0.5);
  const double c = 0.1;
  REQUIRE(2 * mu_direct(c).mu < 1.0);
  const auto recurrent = estimate_survival(10.0, kBinary, c, 40, 400, RngStream(13), o);
  CHECK(recurrent.p_hat <= 0.05);
  for (std::size_t i = 1; i < recurrent.curve.size(); ++i) {
    CHECK(recurrent.curve[i].p_hat <= recurrent.curve[i - 1].p_hat);
  }
}

TEST_CASE("survival is reproducible and independent of thread count") {
  SurvivalOptions one, four;
  one.threads = 1;
  four.threads = 4;
  one.population_cap = four.population_cap = 5000;
  const auto a = estimate_survival(5.0, kBinary, 0.8, 15, 300, RngStream(14), one);
  const auto b = estimate_survival(5.0, kBinary, 0.8, 15, 300, RngStream(14), four);
  REQUIRE(a.curve.size() == b.curve.size());
  for (std::size_t i = 0; i < a.curve.size(); ++i) CHECK(a.curve[i].survivors == b.curve[i].survivors);
  CHECK(a.cap_hits == b.cap_hits);
}

TEST_CASE("monotone dominance") {
  SurvivalOptions o;
  o.population_cap = 20000;
  const auto same = monotone_dominance_check(4.0, 4.0, kBinary, 1.0, 10, 300, RngStream(15), o);
  CHECK(same.holds);
  CHECK(same.p_x == same.p_y);
  for (double v : same.max_violation_se) CHECK(v <= 0.0);

  const auto rep = monotone_dominance_check(2.0, 8.0, kBinary, 1.0, 10, 1000, RngStream(16), o);
  CHECK(rep.holds);
  CHECK(rep.max_violation_se.size() == 10);
  CHECK(rep.p_x <= rep.p_y + 4 * std::hypot(rep.stderr_x, rep.stderr_y));
  CHECK_THROWS_AS(monotone_dominance_check(3.0, 2.0, kBinary, 1.0, 5, 10, RngStream(1)), DomainError);
}

TEST_CASE("GW domination: particles above x0 outnumber one") {
  REQUIRE(2 * mu_direct(1.0).mu > 1.0);
  SurvivalOptions o;
  o.population_cap = 100000;
  const auto n = estimate_interval_count(20.0, kBinary, 1.0, 6, Interval{20.0}, 20000, RngStream(17), o);
  CHECK(n.mean() - 4 * n.stderr_of_mean() > 1.0);
}

TEST_CASE("percolated survival uses the thinned law") {
  SurvivalOptions o;
  o.population_cap = 20000;
  o.eta = 1.0;
  const auto none = estimate_survival(10.0, kBinary, 1.0, 3, 100, RngStream(18), o);
  CHECK(none.p_hat == 0.0);
  o.eta = 0.05;
  const auto some = estimate_survival(20.0, kBinary, 1.0, 25, 200, RngStream(19), o);
  CHECK(some.p_hat >= 0.2);
}

TEST_CASE("barrier runs stop at the first entry below the barrier") {
  RngStream rng(20);
  for (int i = 0; i < 200; ++i) {
    const BarrierRun run = simulate_barrier_run(1.0, std::log(5.0), 30, BarrierMode::y_chain, rng);
    REQUIRE(run.path.front() == run.barrier);
    const std::size_t stop = run.tau ? static_cast<std::size_t>(*run.tau) : run.path.size() - 1;
    for (std::size_t k = 0; k < stop; ++k) CHECK(run.path[k] >= run.barrier);
    if (run.tau) {
      CHECK(run.path[*run.tau] < run.barrier);
      CHECK(run.path.size() == static_cast<std::size_t>(*run.tau) + 1);
    } else {
      CHECK(run.path.size() == 31);
    }
  }
}

TEST_CASE("barrier exponent, i.i.d. control") {
  BarrierOptions o;
  o.replicas = 300000;
  o.mode = BarrierMode::iid_control;
  o.bootstrap_resamples = 200;
  const BarrierResult r = barrier_exponent(1.0, 0.0, o, RngStream(21));
  REQUIRE(r.status == BarrierStatus::ok);
  CHECK(std::abs(r.rate - mu_direct(1.0).mu) < 0.05);
  CHECK(r.ci_lo <= r.rate);
  CHECK(r.ci_hi >= r.rate);
  CHECK(r.table.size() == 30);
  CHECK(r.supermultiplicative());
}

TEST_CASE("barrier exponent, Y chain lower bound") {
  BarrierOptions o;
  o.replicas = 300000;
  o.bootstrap_resamples = 200;
  const BarrierResult r = barrier_exponent(1.0, std::log(50.0), o, RngStream(22));
  REQUIRE(r.status == BarrierStatus::ok);
  CHECK(r.rate >= mu_direct(1.0).mu - 0.05);
  CHECK(r.supermultiplicative());
}

TEST_CASE("barrier exponent reports insufficient data") {
  BarrierOptions o;
  o.replicas = 100;
  o.bootstrap_resamples = 10;
  o.mode = BarrierMode::iid_control;
  const BarrierResult r = barrier_exponent(1.0, 0.0, o, RngStream(23));
  CHECK(r.status == BarrierStatus::insufficient_data);
  o.n_min = 5;
  o.n_max = 5;
  CHECK_THROWS_AS(barrier_exponent(1.0, 0.0, o, RngStream(23)), DomainError);
}
