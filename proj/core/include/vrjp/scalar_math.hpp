#pragma once

#include "vrjp/offspring.hpp"
#include "vrjp/quadrature.hpp"

namespace vrjp {

enum class MuMethod { direct, gaussian, bessel };

const char* to_string(MuMethod m);

/// mu(c) = inf_theta E[m_c(inf)^theta], together with how it was computed.
struct MuValue {
  double c = 0.0;
  double mu = 0.0;
  MuMethod method = MuMethod::direct;
  double err_bound = 0.0;
};

struct MomentValue {
  double c = 0.0;
  double theta = 0.0;
  double value = 0.0;
  double err_bound = 0.0;
};

/// Tight default tolerances used by every mu route.
Quadrature default_quadrature();

/// mu(c) = c / sqrt(2 pi) * int_0^inf x^-1 exp(-(c(x-1))^2 / (2x)) dx.
MuValue mu_direct(double c, const Quadrature& q = default_quadrature());

/// mu(c) = (2pi)^-1/2 * int_R exp(-y^2/2) / sqrt(1 + y^2 / (4c^2)) dy.
MuValue mu_gaussian(double c, const Quadrature& q = default_quadrature());

/// mu(c) = sqrt(2/pi) c e^{c^2} K_0(c^2), the theta = 1/2 moment.
MuValue mu_bessel(double c, const Quadrature& q = default_quadrature());

/// K_order(z) from int_0^inf exp(-z cosh t) cosh(order t) dt, truncated where
/// the integrand drops below 1e-30 of its scale. Symmetric in order.
/// Throws RangeError when the result overflows.
double bessel_k(double order, double z, const Quadrature& q = default_quadrature());

/// e^z K_order(z), computed without forming e^{-z} (no underflow for large z).
double bessel_k_scaled(double order, double z, const Quadrature& q = default_quadrature());

/// E[m_c(inf)^theta] = sqrt(2/pi) c e^{c^2} K_{theta - 1/2}(c^2).
MomentValue moment_m_infinity(double c, double theta,
                              const Quadrature& q = default_quadrature());

struct MomentMinimum {
  double theta_star = 0.0;
  double value = 0.0;
};

/// Golden-section minimisation of theta -> E[m_c(inf)^theta] on [-2, 3],
/// located to 1e-6 in theta.
MomentMinimum minimize_moment(double c);

/// c such that mu(c) = 1/b, by bisection on the increasing map c -> mu(c)
/// until the bracket is narrower than tol. Throws DomainError for b <= 1.
double critical_c(double b, double tol = 1e-10);

/// Smallest fixed point of the generating function of nu in [0, 1].
double extinction_probability(const OffspringDistribution& nu, double tol = 1e-14);

/// Density of m_c(inf): c exp(-(c(x-1))^2/(2x)) / sqrt(2 pi x^3) on x > 0.
double m_infinity_density(double c, double x);

/// P{m_c(inf) <= x} by quadrature of the density.
double m_infinity_cdf(double c, double x, const Quadrature& q = default_quadrature());

/// Closed form of the same CDF, read as inverse-Gaussian(mean 1, shape c^2).
double m_infinity_cdf_closed_form(double c, double x);

}  // namespace vrjp
