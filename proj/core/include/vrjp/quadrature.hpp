#pragma once

#include <functional>
#include <span>

namespace vrjp {

/// Tolerances for adaptive integration. An estimate is accepted once its
/// error estimate is at most max(abs_tol, rel_tol * |value|).
struct Quadrature {
  double abs_tol = 1e-13;
  double rel_tol = 1e-12;
  int max_subdivisions = 4000;

  /// Throws DomainError unless both tolerances are positive and
  /// max_subdivisions >= 1.
  void validate() const;
};

struct IntegralEstimate {
  double value = 0.0;
  double err_bound = 0.0;
  int evaluations = 0;
};

/// Adaptive 7/15-point Gauss-Kronrod integration over [a, b] with global
/// bisection of the worst panel. `breakpoints` (inside (a, b), any order)
/// seed the initial partition.
///
/// Throws NumericalFailure (carrying the partial estimate) if the
/// tolerance is not met within q.max_subdivisions panels.
IntegralEstimate integrate(const std::function<double(double)>& f, double a, double b,
                           const Quadrature& q, std::span<const double> breakpoints = {});

/// Integral over [a, inf) through the map x = a + u / (1 - u), u in [0, 1).
/// Breakpoints are given in x coordinates.
IntegralEstimate integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       const Quadrature& q,
                                       std::span<const double> breakpoints = {});

}  // namespace vrjp
