#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vrjp/rng.hpp"

namespace vrjp {

/// One draw of A_c(t): the local time (including the initial c) at site 1 of
/// the two-site VRJP(c) started at 0, read when the local time at 0 reaches t.
struct ASample {
  double value = 0.0;
  /// True iff no jump happened before the budget at 0 ran out; then
  /// value == c exactly.
  bool hit_atom = false;
  std::uint64_t jumps = 0;
};

/// Inverse-Gaussian(mean, shape) by the transformation-with-selection method.
double sample_inverse_gaussian(double mean, double shape, RngStream& rng);

/// m_c(inf), the law with density c exp(-(c(x-1))^2/(2x)) / sqrt(2 pi x^3),
/// i.e. inverse-Gaussian with mean 1 and shape c^2.
double sample_m_infinity(double c, RngStream& rng);

/// Exact event-driven simulation of the two-site VRJP(c). Cost is O(jumps),
/// which grows like t^2 / 2. Throws DomainError if t < c or c <= 0.
ASample sample_A(double c, double t, RngStream& rng);

/// Same law as sample_A in O(1): after the time change that turns the
/// two-site VRJP into a mixture of Markov jump processes, the mixing
/// variable is m = m_c(inf), the number of excursions to site 1 is
/// Poisson(m ((t/c)^2 - 1) c^2 / 2), and the total time-changed occupation
/// of site 1 is Gamma with that shape and scale 2m / c^2; then
/// A = c sqrt(1 + occupation). `jumps` counts 2 per excursion.
ASample sample_A_mixture(double c, double t, RngStream& rng);

enum class AKernel { event_driven, mixture };

inline ASample sample_A(double c, double t, RngStream& rng, AKernel kernel) {
  return kernel == AKernel::mixture ? sample_A_mixture(c, t, rng) : sample_A(c, t, rng);
}

struct ConvergencePoint {
  double t = 0.0;
  double ks_distance = 0.0;
};

/// For each t in t_grid (increasing, all >= c), draws n copies of
/// A_c(t)/t and reports the Kolmogorov-Smirnov distance to the CDF of
/// m_c(inf), evaluated by quadrature. Replica i at grid index j uses
/// rng.substream(j).substream(i).
std::vector<ConvergencePoint> convergence_check(double c, std::span<const double> t_grid,
                                                std::size_t n, const RngStream& rng,
                                                AKernel kernel = AKernel::mixture);

/// KS distance between the empirical law of `samples` and the m_c(inf) CDF.
/// Sorts `samples` in place.
double ks_distance_to_m_infinity(double c, std::span<double> samples);

}  // namespace vrjp
