#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "vrjp/offspring.hpp"
#include "vrjp/parallel.hpp"
#include "vrjp/rng.hpp"
#include "vrjp/sampling.hpp"
#include "vrjp/stats.hpp"

namespace vrjp {

/// One generation of the branching chain F. Particles strictly above the
/// absorbing value c are stored by position; particles at c never move
/// again and are stored as a count.
struct ParticleFront {
  int generation = 0;
  double c = 0.0;
  std::vector<double> alive;
  std::uint64_t absorbed = 0;
  /// Set once the absorbed count overflowed 64 bits (the count then stays
  /// at its maximum).
  bool absorbed_saturated = false;

  /// A single particle at x0 >= c (absorbed if x0 == c).
  static ParticleFront single(double x0, double c);

  std::size_t alive_count() const { return alive.size(); }
  double total_count() const { return static_cast<double>(alive.size()) + static_cast<double>(absorbed); }
  bool died_out() const { return alive.empty(); }
};

/// One step of the chain Z: a draw of A_c(x). Absorbed at x == c.
double z_step(double x, double c, RngStream& rng, AKernel kernel = AKernel::mixture);

enum class EvolveStatus { ok, population_cap };

struct EvolveResult {
  ParticleFront front;
  /// population_cap: more than `cap` alive particles were produced; the
  /// returned front is incomplete and must not be evolved further.
  EvolveStatus status = EvolveStatus::ok;
};

/// Next generation: each alive particle at x has nu-many children at
/// independent A_c(x) positions; absorbed particles have absorbed children.
/// No randomness is used for absorbed particles when nu is a point mass.
EvolveResult f_evolve(const ParticleFront& front, const OffspringDistribution& nu, double c,
                      RngStream& rng, std::size_t cap = 1'000'000,
                      AKernel kernel = AKernel::mixture);

struct Interval {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = true;
  bool hi_closed = true;

  bool contains(double x) const {
    return (lo_closed ? x >= lo : x > lo) && (hi_closed ? x <= hi : x < hi);
  }
};

/// N^I: number of particles of the front (absorbed ones included) in I.
/// Throws DomainError if lo > hi.
std::uint64_t count_in_interval(const ParticleFront& front, const Interval& interval);

struct SurvivalPoint {
  int n = 0;
  std::size_t survivors = 0;
  std::size_t replicas = 0;
  double p_hat = 0.0;
  double stderr = 0.0;
};

struct SurvivalOptions {
  std::size_t population_cap = 1'000'000;
  /// Percolation of the genealogy: each child is removed (with its
  /// descendants) with probability eta.
  double eta = 0.0;
  AKernel kernel = AKernel::mixture;
  unsigned threads = worker_threads();
};

/// Fraction of replicas with at least one particle above c at generation
/// `generations`. Finite-horizon proxy of survival: it decreases in the
/// horizon, and the whole curve is reported. Replicas that exceed the
/// population cap count as surviving from then on (cap_hits).
struct SurvivalEstimate {
  double p_hat = 0.0;
  double stderr = 0.0;
  std::size_t replicas = 0;
  std::vector<SurvivalPoint> curve;
  std::size_t cap_hits = 0;
};

/// Replica r evolves with stream rng.substream(r). Throws DomainError if
/// x0 < c or counts are zero.
SurvivalEstimate estimate_survival(double x0, const OffspringDistribution& nu, double c,
                                   int generations, std::size_t replicas, const RngStream& rng,
                                   const SurvivalOptions& options = {});

/// Alive-particle counts per generation for one replica; entries after a
/// population-cap hit are max() (i.e. "at least the cap").
std::vector<std::uint64_t> alive_counts(double x0, const OffspringDistribution& nu, double c,
                                        int generations, RngStream& rng,
                                        const SurvivalOptions& options = {});

struct DominanceReport {
  /// For each generation n = 1..G: max over k of
  /// (F_y(k) - F_x(k)) / se, the CDFs being those of the alive counts.
  /// Dominance of y over x means this stays below 4.
  std::vector<double> max_violation_se;
  double p_x = 0.0;
  double p_y = 0.0;
  double stderr_x = 0.0;
  double stderr_y = 0.0;
  bool holds = true;
};

/// Compares alive counts started from x and from y >= x, replica r using
/// rng.substream(r) on both sides.
DominanceReport monotone_dominance_check(double x, double y, const OffspringDistribution& nu,
                                         double c, int generations, std::size_t replicas,
                                         const RngStream& rng,
                                         const SurvivalOptions& options = {});

/// Mean of N_k^I when F starts from one particle at x0.
MeanAccumulator estimate_interval_count(double x0, const OffspringDistribution& nu, double c,
                                        int k, const Interval& interval, std::size_t replicas,
                                        const RngStream& rng, const SurvivalOptions& options = {});

/// E[Z_n] for n = 0..n_max from Z_0 = t, replica r on rng.substream(r).
std::vector<MeanAccumulator> z_chain_means(double t, double c, int n_max, std::size_t replicas,
                                           const RngStream& rng,
                                           AKernel kernel = AKernel::mixture);

enum class BarrierMode {
  /// Y_{n+1} = log A_c(exp(Y_n)), the log of the chain Z.
  y_chain,
  /// Y_{n+1} = Y_n + log m_c(inf): the random walk with the limiting step.
  iid_control,
};

/// One path of Y started at the barrier x, stopped at tau (the first n >= 1
/// with Y_n < x) or at n_max.
struct BarrierRun {
  double barrier = 0.0;
  std::vector<double> path;
  std::optional<int> tau;
};

BarrierRun simulate_barrier_run(double c, double x, int n_max, BarrierMode mode, RngStream& rng);

struct BarrierOptions {
  int n_min = 10;
  int n_max = 30;
  std::size_t replicas = 1'000'000;
  BarrierMode mode = BarrierMode::y_chain;
  int bootstrap_resamples = 1000;
  double confidence = 0.95;
  /// kappa in log P{tau > n} ~ a + n log(rate) - kappa log n; 1.5 is the
  /// polynomial correction of a killed random walk, 0 gives a plain slope.
  double prefactor_exponent = 1.5;
  std::size_t min_survivors = 100;
  unsigned threads = worker_threads();
};

enum class BarrierStatus { ok, insufficient_data };

struct BarrierResult {
  BarrierStatus status = BarrierStatus::ok;
  double rate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  /// P{tau > n} for n = 1..n_max.
  std::vector<SurvivalPoint> table;

  /// P{tau > n + m} >= P{tau > n} P{tau > m} - z * se for all n + m <= n_max.
  bool supermultiplicative(double z = 4.0) const;
};

/// Decay rate of P{tau_x > n}: least-squares fit over [n_min, n_max] with a
/// multinomial bootstrap over the tau histogram for the interval.
/// Replica r uses rng.substream(r).
BarrierResult barrier_exponent(double c, double x, const BarrierOptions& options,
                               const RngStream& rng);

}  // namespace vrjp
