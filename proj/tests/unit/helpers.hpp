#pragma once

#include <cmath>
#include <cstddef>

// Shared tolerances for Monte Carlo assertions.
inline bool within_se(double estimate, double expected, double se, double z = 4.0) {
  return std::abs(estimate - expected) <= z * se;
}

inline double binomial_se(double p, std::size_t n) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}
