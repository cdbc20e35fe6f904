#include "vrjp/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "vrjp/errors.hpp"

namespace vrjp {

namespace {

// Kronrod 15-point nodes on [-1, 1] (non-negative half) with the embedded
// Gauss 7-point rule on the odd-indexed nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gauss_kronrod(const std::function<double(double)>& f, double a, double b, int& evals) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double fsum = f(center - dx) + f(center + dx);
    resk += kWgk[j] * fsum;
    if (j % 2 == 1) resg += kWg[j / 2] * fsum;
  }
  evals += 15;
  return Panel{a, b, resk * half, std::abs((resk - resg) * half)};
}

}  // namespace

void Quadrature::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw DomainError("quadrature tolerances must be positive");
  }
  if (max_subdivisions < 1) throw DomainError("max_subdivisions must be >= 1");
}

IntegralEstimate integrate(const std::function<double(double)>& f, double a, double b,
                           const Quadrature& q, std::span<const double> breakpoints) {
  q.validate();
  if (a == b) return {};
  const double sign = a < b ? 1.0 : -1.0;
  if (a > b) std::swap(a, b);

  std::vector<double> cuts{a};
  for (double p : breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  int evals = 0;
  std::priority_queue<Panel> panels;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Panel p = gauss_kronrod(f, cuts[i], cuts[i + 1], evals);
    total += p.value;
    total_err += p.error;
    panels.push(p);
  }

  auto target = [&] { return std::max(q.abs_tol, q.rel_tol * std::abs(total)); };
  int subdivisions = static_cast<int>(panels.size());
  while (total_err > target()) {
    if (subdivisions >= q.max_subdivisions) {
      std::ostringstream msg;
      msg << "quadrature did not converge after " << subdivisions
          << " panels (estimate " << total << ", error " << total_err << ")";
      throw NumericalFailure(msg.str(), sign * total, total_err);
    }
    Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Panel already at floating-point resolution.
      std::ostringstream msg;
      msg << "quadrature panel collapsed at x=" << worst.a;
      throw NumericalFailure(msg.str(), sign * total, total_err);
    }
    Panel left = gauss_kronrod(f, worst.a, mid, evals);
    Panel right = gauss_kronrod(f, mid, worst.b, evals);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++subdivisions;
  }

  // Re-sum to remove drift from the incremental updates.
  double value = 0.0;
  double err = 0.0;
  while (!panels.empty()) {
    value += panels.top().value;
    err += panels.top().error;
    panels.pop();
  }
  return IntegralEstimate{sign * value, err, evals};
}

IntegralEstimate integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       const Quadrature& q,
                                       std::span<const double> breakpoints) {
  auto mapped = [&](double u) {
    if (u >= 1.0) return 0.0;
    const double one_minus = 1.0 - u;
    const double x = a + u / one_minus;
    const double v = f(x);
    return v == 0.0 ? 0.0 : v / (one_minus * one_minus);
  };
  std::vector<double> ucuts;
  ucuts.reserve(breakpoints.size());
  for (double x : breakpoints) {
    if (x > a && std::isfinite(x)) {
      const double d = x - a;
      ucuts.push_back(d / (1.0 + d));
    }
  }
  return integrate(mapped, 0.0, 1.0, q, ucuts);
}

}  // namespace vrjp
