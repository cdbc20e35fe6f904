#include "vrjp/branching.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/random/binomial_distribution.hpp>

#include "vrjp/errors.hpp"

namespace vrjp {

namespace {

constexpr std::uint64_t kMaxCount = std::numeric_limits<std::uint64_t>::max();
constexpr std::uint64_t kBootstrapTag = 0xB007;

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b, bool& saturated) {
  if (a > kMaxCount - b) {
    saturated = true;
    return kMaxCount;
  }
  return a + b;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b, bool& saturated) {
  if (a != 0 && b > kMaxCount / a) {
    saturated = true;
    return kMaxCount;
  }
  return a * b;
}

std::uint64_t binomial(std::uint64_t n, double p, RngStream& rng) {
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  boost::random::binomial_distribution<std::int64_t, double> dist(static_cast<std::int64_t>(n), p);
  return static_cast<std::uint64_t>(dist(rng));
}

// Total number of children of m independent nu-distributed parents, drawn
// as a multinomial split of m over the support.
std::uint64_t children_of_absorbed(std::uint64_t m, const OffspringDistribution& nu,
                                   RngStream& rng, bool& saturated) {
  if (m == 0) return 0;
  if (nu.is_deterministic()) return saturating_mul(m, nu.max_k(), saturated);
  std::uint64_t remaining = m;
  double mass_left = 1.0;
  std::uint64_t total = 0;
  const auto support = nu.support();
  for (std::size_t i = 0; i < support.size() && remaining > 0; ++i) {
    const auto& atom = support[i];
    const std::uint64_t n_k =
        i + 1 == support.size() ? remaining : binomial(remaining, atom.p / mass_left, rng);
    remaining -= n_k;
    mass_left -= atom.p;
    total = saturating_add(total, saturating_mul(n_k, atom.k, saturated), saturated);
  }
  return total;
}

void check_counts(int generations, std::size_t replicas) {
  if (generations < 1) throw DomainError("generations must be >= 1");
  if (replicas < 1) throw DomainError("replicas must be >= 1");
}

}  // namespace

ParticleFront ParticleFront::single(double x0, double c) {
  if (!(c > 0.0)) throw DomainError("c must be positive");
  if (!(x0 >= c)) throw DomainError("starting position must be >= c");
  ParticleFront f;
  f.c = c;
  if (x0 == c) {
    f.absorbed = 1;
  } else {
    f.alive.push_back(x0);
  }
  return f;
}

double z_step(double x, double c, RngStream& rng, AKernel kernel) {
  if (x == c) return c;
  return sample_A(c, x, rng, kernel).value;
}

EvolveResult f_evolve(const ParticleFront& front, const OffspringDistribution& nu, double c,
                      RngStream& rng, std::size_t cap, AKernel kernel) {
  EvolveResult out;
  ParticleFront& next = out.front;
  next.generation = front.generation + 1;
  next.c = c;
  next.absorbed_saturated = front.absorbed_saturated;
  for (double x : front.alive) {
    const std::uint32_t k = nu.sample(rng);
    for (std::uint32_t i = 0; i < k; ++i) {
      const ASample a = sample_A(c, x, rng, kernel);
      if (a.hit_atom) {
        next.absorbed = saturating_add(next.absorbed, 1, next.absorbed_saturated);
      } else {
        next.alive.push_back(a.value);
        if (next.alive.size() > cap) {
          out.status = EvolveStatus::population_cap;
          return out;
        }
      }
    }
  }
  const std::uint64_t from_absorbed =
      children_of_absorbed(front.absorbed, nu, rng, next.absorbed_saturated);
  next.absorbed = saturating_add(next.absorbed, from_absorbed, next.absorbed_saturated);
  return out;
}

std::uint64_t count_in_interval(const ParticleFront& front, const Interval& interval) {
  if (interval.lo > interval.hi) throw DomainError("interval with lo > hi");
  std::uint64_t n = static_cast<std::uint64_t>(
      std::count_if(front.alive.begin(), front.alive.end(),
                    [&](double x) { return interval.contains(x); }));
  if (interval.contains(front.c)) n += front.absorbed;
  return n;
}

std::vector<std::uint64_t> alive_counts(double x0, const OffspringDistribution& nu, double c,
                                        int generations, RngStream& rng,
                                        const SurvivalOptions& options) {
  const OffspringDistribution law = options.eta > 0.0 ? nu.thinned(options.eta) : nu;
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(generations), 0);
  ParticleFront front = ParticleFront::single(x0, c);
  for (int g = 0; g < generations; ++g) {
    if (front.died_out()) break;
    // Absorbed particles cannot affect alive counts; drop them.
    front.absorbed = 0;
    EvolveResult r = f_evolve(front, law, c, rng, options.population_cap, options.kernel);
    if (r.status == EvolveStatus::population_cap) {
      std::fill(counts.begin() + g, counts.end(), kMaxCount);
      break;
    }
    front = std::move(r.front);
    counts[g] = front.alive_count();
  }
  return counts;
}

SurvivalEstimate estimate_survival(double x0, const OffspringDistribution& nu, double c,
                                   int generations, std::size_t replicas, const RngStream& rng,
                                   const SurvivalOptions& options) {
  check_counts(generations, replicas);
  if (!(c > 0.0)) throw DomainError("c must be positive");
  if (!(x0 >= c)) throw DomainError("x0 must be >= c");

  // Per replica: last generation with an alive particle, and cap flag.
  std::vector<int> last_alive(replicas, 0);
  std::vector<char> capped(replicas, 0);
  parallel_for(
      replicas,
      [&](std::size_t r) {
        RngStream s = rng.substream(r);
        const auto counts = alive_counts(x0, nu, c, generations, s, options);
        int last = 0;
        for (int g = 0; g < generations; ++g) {
          if (counts[g] == 0) break;
          last = g + 1;
          if (counts[g] == kMaxCount) {
            capped[r] = 1;
            last = generations;
            break;
          }
        }
        last_alive[r] = last;
      },
      options.threads);

  SurvivalEstimate est;
  est.replicas = replicas;
  for (char flag : capped) est.cap_hits += flag ? 1 : 0;
  for (int n = 1; n <= generations; ++n) {
    const auto survivors = static_cast<std::size_t>(
        std::count_if(last_alive.begin(), last_alive.end(), [n](int l) { return l >= n; }));
    const double p = static_cast<double>(survivors) / static_cast<double>(replicas);
    est.curve.push_back({n, survivors, replicas, p, binomial_stderr(p, replicas)});
  }
  est.p_hat = est.curve.back().p_hat;
  est.stderr = est.curve.back().stderr;
  return est;
}

DominanceReport monotone_dominance_check(double x, double y, const OffspringDistribution& nu,
                                         double c, int generations, std::size_t replicas,
                                         const RngStream& rng, const SurvivalOptions& options) {
  check_counts(generations, replicas);
  if (!(y >= x)) throw DomainError("dominance check requires y >= x");
  std::vector<std::vector<std::uint64_t>> from_x(replicas);
  std::vector<std::vector<std::uint64_t>> from_y(replicas);
  parallel_for(
      replicas,
      [&](std::size_t r) {
        RngStream sx = rng.substream(r);
        RngStream sy = rng.substream(r);
        from_x[r] = alive_counts(x, nu, c, generations, sx, options);
        from_y[r] = alive_counts(y, nu, c, generations, sy, options);
      },
      options.threads);

  DominanceReport report;
  const double n = static_cast<double>(replicas);
  for (int g = 0; g < generations; ++g) {
    std::vector<std::uint64_t> ax(replicas);
    std::vector<std::uint64_t> ay(replicas);
    for (std::size_t r = 0; r < replicas; ++r) {
      ax[r] = from_x[r][g];
      ay[r] = from_y[r][g];
    }
    std::sort(ax.begin(), ax.end());
    std::sort(ay.begin(), ay.end());
    std::vector<std::uint64_t> grid = ax;
    grid.insert(grid.end(), ay.begin(), ay.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    double worst = -std::numeric_limits<double>::infinity();
    for (std::uint64_t k : grid) {
      const double fx = static_cast<double>(std::upper_bound(ax.begin(), ax.end(), k) - ax.begin()) / n;
      const double fy = static_cast<double>(std::upper_bound(ay.begin(), ay.end(), k) - ay.begin()) / n;
      const double diff = fy - fx;
      const double se = std::sqrt((fx * (1 - fx) + fy * (1 - fy)) / n);
      double v = 0.0;
      if (se > 0.0) {
        v = diff / se;
      } else if (diff > 0.0) {
        v = std::numeric_limits<double>::infinity();
      }
      worst = std::max(worst, v);
    }
    report.max_violation_se.push_back(worst);
    if (worst > 4.0) report.holds = false;
  }
  auto alive_fraction = [&](const auto& runs) {
    double alive = 0.0;
    for (const auto& counts : runs) alive += counts.back() > 0 ? 1.0 : 0.0;
    return alive / n;
  };
  report.p_x = alive_fraction(from_x);
  report.p_y = alive_fraction(from_y);
  report.stderr_x = binomial_stderr(report.p_x, replicas);
  report.stderr_y = binomial_stderr(report.p_y, replicas);
  return report;
}

MeanAccumulator estimate_interval_count(double x0, const OffspringDistribution& nu, double c,
                                        int k, const Interval& interval, std::size_t replicas,
                                        const RngStream& rng, const SurvivalOptions& options) {
  check_counts(k, replicas);
  const OffspringDistribution law = options.eta > 0.0 ? nu.thinned(options.eta) : nu;
  std::vector<double> counts(replicas, 0.0);
  std::vector<char> capped(replicas, 0);
  parallel_for(
      replicas,
      [&](std::size_t r) {
        RngStream s = rng.substream(r);
        ParticleFront front = ParticleFront::single(x0, c);
        for (int g = 0; g < k; ++g) {
          EvolveResult res = f_evolve(front, law, c, s, options.population_cap, options.kernel);
          if (res.status == EvolveStatus::population_cap) {
            capped[r] = 1;
            return;
          }
          front = std::move(res.front);
        }
        counts[r] = static_cast<double>(count_in_interval(front, interval));
      },
      options.threads);
  if (std::find(capped.begin(), capped.end(), 1) != capped.end()) {
    throw RangeError("population cap reached while counting particles");
  }
  MeanAccumulator acc;
  for (double v : counts) acc.add(v);
  return acc;
}

std::vector<MeanAccumulator> z_chain_means(double t, double c, int n_max, std::size_t replicas,
                                           const RngStream& rng, AKernel kernel) {
  if (!(t >= c)) throw DomainError("Z_0 must be >= c");
  std::vector<MeanAccumulator> acc(static_cast<std::size_t>(n_max) + 1);
  for (std::size_t r = 0; r < replicas; ++r) {
    RngStream s = rng.substream(r);
    double z = t;
    acc[0].add(z);
    for (int n = 1; n <= n_max; ++n) {
      z = z_step(z, c, s, kernel);
      acc[n].add(z);
    }
  }
  return acc;
}

namespace {

double barrier_next(double y, double c, BarrierMode mode, RngStream& rng) {
  if (mode == BarrierMode::iid_control) return y + std::log(sample_m_infinity(c, rng));
  return std::log(z_step(std::exp(y), c, rng));
}

}  // namespace

BarrierRun simulate_barrier_run(double c, double x, int n_max, BarrierMode mode, RngStream& rng) {
  BarrierRun run{x, {x}, std::nullopt};
  double y = x;
  for (int n = 1; n <= n_max; ++n) {
    y = barrier_next(y, c, mode, rng);
    run.path.push_back(y);
    if (y < x) {
      run.tau = n;
      break;
    }
  }
  return run;
}

bool BarrierResult::supermultiplicative(double z) const {
  const auto n_max = static_cast<int>(table.size());
  for (int n = 1; n <= n_max; ++n) {
    for (int m = 1; n + m <= n_max; ++m) {
      const SurvivalPoint& a = table[n - 1];
      const SurvivalPoint& b = table[m - 1];
      const SurvivalPoint& ab = table[n + m - 1];
      const double se = ab.stderr + a.p_hat * b.stderr + b.p_hat * a.stderr;
      if (ab.p_hat < a.p_hat * b.p_hat - z * se) return false;
    }
  }
  return true;
}

BarrierResult barrier_exponent(double c, double x, const BarrierOptions& o, const RngStream& rng) {
  if (!(c > 0.0)) throw DomainError("c must be positive");
  if (o.n_min < 1 || o.n_max <= o.n_min) throw DomainError("need 1 <= n_min < n_max");
  if (o.replicas < 1) throw DomainError("replicas must be >= 1");

  // tau histogram: index n in 1..n_max, index 0 for "survived past n_max".
  std::vector<int> tau(o.replicas, 0);
  parallel_for(
      o.replicas,
      [&](std::size_t r) {
        RngStream s = rng.substream(r);
        double y = x;
        for (int n = 1; n <= o.n_max; ++n) {
          y = barrier_next(y, c, o.mode, s);
          if (y < x) {
            tau[r] = n;
            return;
          }
        }
      },
      o.threads);
  std::vector<std::uint64_t> hist(static_cast<std::size_t>(o.n_max) + 1, 0);
  for (int t : tau) ++hist[t];

  const double total = static_cast<double>(o.replicas);
  auto survivors_from = [&](const std::vector<std::uint64_t>& h) {
    std::vector<std::uint64_t> s(static_cast<std::size_t>(o.n_max) + 1, 0);
    std::uint64_t left = o.replicas;
    for (int n = 1; n <= o.n_max; ++n) {
      left -= h[n];
      s[n] = left;
    }
    return s;
  };
  auto fit = [&](const std::vector<std::uint64_t>& s) -> std::optional<double> {
    std::vector<double> xs;
    std::vector<double> ys;
    for (int n = o.n_min; n <= o.n_max; ++n) {
      if (s[n] == 0) return std::nullopt;
      xs.push_back(n);
      ys.push_back(std::log(static_cast<double>(s[n]) / total) +
                   o.prefactor_exponent * std::log(static_cast<double>(n)));
    }
    return std::exp(least_squares(xs, ys).slope);
  };

  BarrierResult result;
  const auto survivors = survivors_from(hist);
  for (int n = 1; n <= o.n_max; ++n) {
    const double p = static_cast<double>(survivors[n]) / total;
    result.table.push_back({n, survivors[n], o.replicas, p, binomial_stderr(p, o.replicas)});
  }
  if (survivors[o.n_max] < o.min_survivors) {
    result.status = BarrierStatus::insufficient_data;
    return result;
  }
  result.rate = *fit(survivors);

  // Bootstrap: resampling replicas with replacement is a multinomial draw
  // over the tau histogram.
  std::vector<double> rates;
  const RngStream boot = rng.substream(kBootstrapTag);
  for (int b = 0; b < o.bootstrap_resamples; ++b) {
    RngStream s = boot.substream(static_cast<std::uint64_t>(b));
    std::vector<std::uint64_t> h(hist.size(), 0);
    std::uint64_t remaining = o.replicas;
    double mass_left = 1.0;
    for (std::size_t i = 0; i < hist.size() && remaining > 0; ++i) {
      const double p = static_cast<double>(hist[i]) / total;
      const std::uint64_t k =
          i + 1 == hist.size() ? remaining : binomial(remaining, std::min(1.0, p / mass_left), s);
      h[i] = k;
      remaining -= k;
      mass_left -= p;
    }
    if (auto r = fit(survivors_from(h))) rates.push_back(*r);
  }
  if (rates.empty()) {
    result.ci_lo = result.ci_hi = result.rate;
  } else {
    const double alpha = 0.5 * (1.0 - o.confidence);
    result.ci_lo = quantile(rates, alpha);
    result.ci_hi = quantile(rates, 1.0 - alpha);
  }
  return result;
}

}  // namespace vrjp
