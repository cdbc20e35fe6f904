#include "vrjp/sampling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

#include "vrjp/errors.hpp"
#include "vrjp/quadrature.hpp"
#include "vrjp/scalar_math.hpp"

namespace vrjp {

namespace {

// Above this mean, Poisson and Gamma draws switch to a normal approximation
// (relative skewness < 1e-7).
constexpr double kNormalApproxThreshold = 1e15;

double standard_normal(RngStream& rng) {
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  return normal(rng);
}

double poisson_count(double mean, RngStream& rng) {
  if (mean <= 0.0) return 0.0;
  if (mean > kNormalApproxThreshold) {
    return std::max(0.0, std::round(mean + std::sqrt(mean) * standard_normal(rng)));
  }
  boost::random::poisson_distribution<std::int64_t, double> poisson(mean);
  return static_cast<double>(poisson(rng));
}

double gamma_variate(double shape, double scale, RngStream& rng) {
  if (shape > kNormalApproxThreshold) {
    return scale * std::max(0.0, shape + std::sqrt(shape) * standard_normal(rng));
  }
  boost::random::gamma_distribution<double> gamma(shape, scale);
  return gamma(rng);
}

void check_A_args(double c, double t) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("A_c(t) requires c > 0");
  if (!(t >= c) || !std::isfinite(t)) throw DomainError("A_c(t) requires t >= c");
}

}  // namespace

double sample_inverse_gaussian(double mean, double shape, RngStream& rng) {
  const double nu = standard_normal(rng);
  const double y = nu * nu;
  const double my = mean * y;
  // Roots of shape (x - mean)^2 = mean^2 y x have product mean^2; taking the
  // smaller one as mean^2 / larger avoids cancellation when shape >> mean y.
  const double larger =
      mean + mean * my / (2.0 * shape) + mean / (2.0 * shape) * std::sqrt(4.0 * shape * my + my * my);
  const double smaller = mean * mean / larger;
  const double u = rng.uniform();
  return u <= mean / (mean + smaller) ? smaller : larger;
}

double sample_m_infinity(double c, RngStream& rng) {
  if (!(c > 0.0)) throw DomainError("m_c(inf) requires c > 0");
  return sample_inverse_gaussian(1.0, c * c, rng);
}

ASample sample_A(double c, double t, RngStream& rng) {
  check_A_args(c, t);
  // Local times, including the initial c, at sites 0 and 1. The walk sits
  // at 0 and leaves at rate l1; at 1 it leaves at rate l0.
  double l0 = c;
  double l1 = c;
  std::uint64_t jumps = 0;
  for (;;) {
    const double budget = t - l0;
    const double hold = rng.exponential(l1);
    if (hold >= budget) break;
    l0 += hold;
    ++jumps;
    l1 += rng.exponential(l0);
    ++jumps;
  }
  return ASample{l1, jumps == 0, jumps};
}

ASample sample_A_mixture(double c, double t, RngStream& rng) {
  check_A_args(c, t);
  const double m = sample_m_infinity(c, rng);
  const double r = t / c;
  // Time-changed occupation budget at site 0: r^2 - 1.
  const double budget = (r - 1.0) * (r + 1.0);
  const double c2 = c * c;
  const double excursions = poisson_count(0.5 * c2 * m * budget, rng);
  if (excursions == 0.0) return ASample{c, true, 0};
  const double occupation = gamma_variate(excursions, 2.0 * m / c2, rng);
  const double value = c * std::sqrt(1.0 + occupation);
  const auto jumps = excursions >= 9.2e18 ? std::numeric_limits<std::uint64_t>::max()
                                          : static_cast<std::uint64_t>(2.0 * excursions);
  // value > c strictly: occupation > 0 almost surely, and the atom is
  // reported only through the excursion count.
  return ASample{std::max(value, std::nextafter(c, INFINITY)), false, jumps};
}

double ks_distance_to_m_infinity(double c, std::span<double> samples) {
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  if (samples.empty()) return 0.0;
  const Quadrature q{1e-13, 1e-11, 20000};
  auto f = [c](double y) { return m_infinity_density(c, y); };

  // The CDF is accumulated piecewise between consecutive distinct samples:
  // one short integral per gap instead of one long integral per sample.
  double cdf = 0.0;
  double prev = 0.0;
  double d = 0.0;
  std::size_t i = 0;
  while (i < samples.size()) {
    const double x = samples[i];
    if (x > prev) {
      if (prev == 0.0) {
        cdf = m_infinity_cdf(c, x, q);
      } else {
        cdf += integrate(f, prev, x, q).value;
      }
      prev = x;
    }
    std::size_t j = i;
    while (j < samples.size() && samples[j] == x) ++j;
    const double below = static_cast<double>(i) / n;
    const double upto = static_cast<double>(j) / n;
    d = std::max({d, std::abs(cdf - below), std::abs(upto - cdf)});
    i = j;
  }
  return d;
}

std::vector<ConvergencePoint> convergence_check(double c, std::span<const double> t_grid,
                                                std::size_t n, const RngStream& rng,
                                                AKernel kernel) {
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    if (!(t_grid[j] >= c)) throw DomainError("convergence_check requires t >= c");
    if (j > 0 && !(t_grid[j] > t_grid[j - 1])) {
      throw DomainError("convergence_check requires an increasing t grid");
    }
  }
  std::vector<ConvergencePoint> out;
  std::vector<double> draws(n);
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    const double t = t_grid[j];
    const RngStream grid_stream = rng.substream(j);
    for (std::size_t i = 0; i < n; ++i) {
      RngStream s = grid_stream.substream(i);
      draws[i] = sample_A(c, t, s, kernel).value / t;
    }
    out.push_back({t, ks_distance_to_m_infinity(c, draws)});
  }
  return out;
}

}  // namespace vrjp
