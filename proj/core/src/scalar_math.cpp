#include "vrjp/scalar_math.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "vrjp/errors.hpp"

namespace vrjp {

namespace {

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;  // 1/sqrt(2 pi)
constexpr double kLogTiny = 69.0775527898213705205;                      // -log(1e-30)

void require_positive_c(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("c must be finite and positive");
}

// log of the dominant part of the Bessel integrand, |nu| t - 2 z sinh^2(t/2).
double bessel_log_envelope(double order, double z, double t) {
  const double s = std::sinh(0.5 * t);
  return order * t - 2.0 * z * s * s;
}

// e^z K_order(z) as (value, error), with the integrand rescaled by its peak.
IntegralEstimate bessel_scaled_estimate(double order, double z, const Quadrature& q) {
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("bessel_k requires z > 0");
  order = std::abs(order);
  const double t_peak = std::asinh(order / z);
  const double log_peak = bessel_log_envelope(order, z, t_peak);

  // Upper truncation: first t past the peak where the envelope has fallen
  // by 1e-30 relative to its maximum.
  double lo = t_peak;
  double hi = t_peak + 1.0;
  while (bessel_log_envelope(order, z, hi) > log_peak - kLogTiny) {
    lo = hi;
    hi = t_peak + 2.0 * (hi - t_peak);
  }
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (bessel_log_envelope(order, z, mid) > log_peak - kLogTiny ? lo : hi) = mid;
  }
  const double t_max = hi;

  auto integrand = [&](double t) {
    const double s = std::sinh(0.5 * t);
    const double base = -2.0 * z * s * s - log_peak;
    // cosh(order t) = (e^{order t} + e^{-order t}) / 2
    return 0.5 * (std::exp(base + order * t) + std::exp(base - order * t));
  };
  const std::array<double, 1> cuts{t_peak};
  IntegralEstimate est = integrate(integrand, 0.0, t_max, q, cuts);
  if (log_peak + std::log(std::abs(est.value)) > 709.0) {
    throw RangeError("bessel_k overflows double precision");
  }
  const double scale = std::exp(log_peak);
  est.value *= scale;
  est.err_bound *= scale;
  return est;
}

}  // namespace

const char* to_string(MuMethod m) {
  switch (m) {
    case MuMethod::direct:
      return "direct";
    case MuMethod::gaussian:
      return "gaussian";
    case MuMethod::bessel:
      return "bessel";
  }
  return "?";
}

Quadrature default_quadrature() { return Quadrature{1e-14, 1e-13, 20000}; }

MuValue mu_direct(double c, const Quadrature& q) {
  require_positive_c(c);
  const double c2 = c * c;
  auto integrand = [c2](double x) {
    if (x <= 0.0) return 0.0;
    const double d = 1.0 - x;
    return std::exp(-std::log(x) - c2 * d * d / (2.0 * x));
  };
  // x -> 1/x maps the integrand on (1, inf) onto itself on (0, 1), so the
  // integral is twice the one over (0, 1). There it is ~1/x from x ~ c^2 up
  // to 1 (decade cuts) with a bump of width ~1/c below 1 for large c.
  std::vector<double> cuts;
  for (double x = 0.1; x > 1e-3 * c2 && x > 1e-300; x *= 0.1) cuts.push_back(x);
  for (double k : {1.0, 4.0, 16.0}) {
    if (1.0 - k / c > 0.0) cuts.push_back(1.0 - k / c);
  }
  IntegralEstimate est = integrate(integrand, 0.0, 1.0, q, cuts);
  est.value *= 2.0;
  est.err_bound *= 2.0;
  const double pref = c * kInvSqrt2Pi;
  return MuValue{c, pref * est.value, MuMethod::direct, pref * est.err_bound};
}

MuValue mu_gaussian(double c, const Quadrature& q) {
  require_positive_c(c);
  const double inv4c2 = 1.0 / (4.0 * c * c);
  auto integrand = [inv4c2](double y) {
    return std::exp(-0.5 * y * y) / std::sqrt(1.0 + y * y * inv4c2);
  };
  const std::array<double, 3> cuts{1.0, 4.0, 8.0};
  const IntegralEstimate est = integrate_to_infinity(integrand, 0.0, q, cuts);
  const double pref = 2.0 * kInvSqrt2Pi;
  return MuValue{c, pref * est.value, MuMethod::gaussian, pref * est.err_bound};
}

MuValue mu_bessel(double c, const Quadrature& q) {
  const MomentValue m = moment_m_infinity(c, 0.5, q);
  return MuValue{c, m.value, MuMethod::bessel, m.err_bound};
}

double bessel_k_scaled(double order, double z, const Quadrature& q) {
  return bessel_scaled_estimate(order, z, q).value;
}

double bessel_k(double order, double z, const Quadrature& q) {
  const IntegralEstimate est = bessel_scaled_estimate(order, z, q);
  const double v = est.value * std::exp(-z);
  if (!std::isfinite(v)) throw RangeError("bessel_k overflows double precision");
  return v;
}

MomentValue moment_m_infinity(double c, double theta, const Quadrature& q) {
  require_positive_c(c);
  if (!std::isfinite(theta)) throw DomainError("theta must be finite");
  const IntegralEstimate k = bessel_scaled_estimate(theta - 0.5, c * c, q);
  const double pref = std::sqrt(2.0 / std::numbers::pi) * c;
  return MomentValue{c, theta, pref * k.value, pref * k.err_bound};
}

MomentMinimum minimize_moment(double c) {
  require_positive_c(c);
  const Quadrature q = default_quadrature();
  auto f = [&](double theta) { return moment_m_infinity(c, theta, q).value; };

  // Golden section down to a bracket of 1e-3 ...
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = -2.0;
  double b = 3.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > 1e-3) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }

  // ... then bisection on the sign of d/dtheta, which is the sign of
  // int e^{-z(cosh t - 1)} t sinh((theta - 1/2) t) dt. The moment is too
  // flat near its minimum for value comparisons to resolve 1e-6.
  const double z = c * c;
  auto slope = [&](double theta) {
    const double nu = theta - 0.5;
    auto g = [&](double t) {
      const double s = std::sinh(0.5 * t);
      return t * std::sinh(nu * t) * std::exp(-2.0 * z * s * s);
    };
    const double t_max = std::acosh(1.0 + (kLogTiny + 40.0 + 4.0 * std::abs(nu)) / z) + 1.0;
    return integrate(g, 0.0, t_max, Quadrature{1e-300, 1e-10, 20000}).value;
  };
  double lo = a;
  double hi = b;
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) < 0.0 ? lo : hi) = mid;
  }
  const double theta_star = 0.5 * (lo + hi);
  return MomentMinimum{theta_star, f(theta_star)};
}

double critical_c(double b, double tol) {
  if (!(b > 1.0) || !std::isfinite(b)) throw DomainError("critical_c requires b > 1");
  if (!(tol > 0.0)) throw DomainError("critical_c requires tol > 0");
  const double target = 1.0 / b;
  auto mu = [](double c) { return mu_direct(c).mu; };
  double lo = 1e-6;
  double hi = 64.0;
  while (mu(lo) > target) lo *= 0.5;
  while (mu(hi) < target) hi *= 2.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (mu(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double extinction_probability(const OffspringDistribution& nu, double tol) {
  if (nu.leafless()) return 0.0;
  if (nu.mean() <= 1.0) return 1.0;
  double q = 0.0;
  for (int i = 0; i < 1'000'000; ++i) {
    const double next = nu.pgf(q);
    if (std::abs(next - q) < tol) return next;
    q = next;
  }
  return q;
}

double m_infinity_density(double c, double x) {
  require_positive_c(c);
  if (!(x > 0.0)) return 0.0;
  if (!std::isfinite(x)) return 0.0;
  const double d = x - 1.0;
  return std::exp(std::log(c * kInvSqrt2Pi) - 1.5 * std::log(x) - c * c * d * d / (2.0 * x));
}

double m_infinity_cdf(double c, double x, const Quadrature& q) {
  require_positive_c(c);
  if (!(x > 0.0)) return 0.0;
  if (!std::isfinite(x)) return 1.0;
  auto f = [c](double y) { return m_infinity_density(c, y); };
  if (x <= 1.0) {
    const std::array<double, 1> cuts{0.5 * x};
    return integrate(f, 0.0, x, q, cuts).value;
  }
  // Upper tail is the smaller piece above the mode region.
  const std::array<double, 2> cuts{2.0 * x, 10.0 * x};
  return 1.0 - integrate_to_infinity(f, x, q, cuts).value;
}

namespace {

// log Phi(-a) for a >= 0, accurate where Phi(-a) underflows.
double log_normal_lower_tail(double a) {
  if (a < 30.0) return std::log(0.5 * std::erfc(a / std::numbers::sqrt2));
  const double a2 = a * a;
  return -0.5 * a2 - std::log(a) - 0.5 * std::log(2.0 * std::numbers::pi) +
         std::log1p(-1.0 / a2 + 3.0 / (a2 * a2));
}

}  // namespace

double m_infinity_cdf_closed_form(double c, double x) {
  require_positive_c(c);
  if (!(x > 0.0)) return 0.0;
  if (!std::isfinite(x)) return 1.0;
  const double lambda = c * c;
  const double r = std::sqrt(lambda / x);
  const double first = 0.5 * std::erfc(-r * (x - 1.0) / std::numbers::sqrt2);
  const double second = std::exp(2.0 * lambda + log_normal_lower_tail(r * (x + 1.0)));
  return first + second;
}

}  // namespace vrjp
