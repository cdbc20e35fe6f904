#include <benchmark/benchmark.h>

#include "vrjp/branching.hpp"
#include "vrjp/sampling.hpp"
#include "vrjp/scalar_math.hpp"
#include "vrjp/walk.hpp"

using namespace vrjp;

static void BM_SampleA_EventDriven(benchmark::State& state) {
  const double t = static_cast<double>(state.range(0));
  RngStream rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sample_A(1.0, t, rng).value);
}
BENCHMARK(BM_SampleA_EventDriven)->Arg(2)->Arg(10)->Arg(100);

static void BM_SampleA_Mixture(benchmark::State& state) {
  const double t = static_cast<double>(state.range(0));
  RngStream rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sample_A_mixture(1.0, t, rng).value);
}
BENCHMARK(BM_SampleA_Mixture)->Arg(2)->Arg(10)->Arg(1000);

static void BM_MInfinity(benchmark::State& state) {
  RngStream rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(sample_m_infinity(1.0, rng));
}
BENCHMARK(BM_MInfinity);

static void BM_Mu(benchmark::State& state) {
  const auto method = static_cast<MuMethod>(state.range(0));
  double c = 0.5;
  for (auto _ : state) {
    switch (method) {
      case MuMethod::direct: benchmark::DoNotOptimize(mu_direct(c).mu); break;
      case MuMethod::gaussian: benchmark::DoNotOptimize(mu_gaussian(c).mu); break;
      case MuMethod::bessel: benchmark::DoNotOptimize(mu_bessel(c).mu); break;
    }
    c = c < 4.0 ? c * 1.01 : 0.5;
  }
  state.SetLabel(to_string(method));
}
BENCHMARK(BM_Mu)->DenseRange(0, 2);

static void BM_WalkSteps(benchmark::State& state) {
  RootedTree tree = regular_tree(2);
  RngStream rng(3);
  WalkState s = start_walk();
  for (auto _ : state) step(s, tree, 1.0, rng);
  state.counters["vertices"] = static_cast<double>(tree.size());
}
BENCHMARK(BM_WalkSteps);

static void BM_FEvolveGeneration(benchmark::State& state) {
  RngStream rng(4);
  const auto nu = OffspringDistribution::deterministic(2);
  ParticleFront f = ParticleFront::single(10.0, 1.0);
  for (int g = 0; g < 10; ++g) f = f_evolve(f, nu, 1.0, rng).front;
  for (auto _ : state) benchmark::DoNotOptimize(f_evolve(f, nu, 1.0, rng).front.alive.size());
  state.counters["alive"] = static_cast<double>(f.alive_count());
}
BENCHMARK(BM_FEvolveGeneration);
BENCHMARK_MAIN();
