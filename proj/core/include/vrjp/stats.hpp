#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace vrjp {

/// Streaming mean and variance (Welford). merge() is associative.
class MeanAccumulator {
 public:
  void add(double x);
  void merge(const MeanAccumulator& other);

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  /// Unbiased sample variance; 0 with fewer than two samples.
  double variance() const;
  double stderr_of_mean() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Standard error of a binomial proportion estimate p_hat from n trials.
double binomial_stderr(double p_hat, std::size_t n);

/// sup |F_a - F_b| between two empirical CDFs. Sorts both inputs in place.
double ks_two_sample(std::span<double> a, std::span<double> b);

/// sup |F_n - F| for a continuous or discontinuous model CDF F. Sorts the
/// samples in place.
double ks_one_sample(std::span<double> samples, const std::function<double(double)>& cdf);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Linear-interpolated empirical quantile, q in [0, 1]. Sorts in place.
double quantile(std::span<double> values, double q);

}  // namespace vrjp
