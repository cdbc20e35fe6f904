#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vrjp/rng.hpp"

namespace vrjp {

/// Finitely supported probability law on the non-negative integers.
class OffspringDistribution {
 public:
  struct Atom {
    std::uint32_t k;
    double p;
  };

  /// Validates and normalizes the representation: atoms are sorted by k,
  /// duplicates merged, zero-probability atoms dropped. Throws DomainError
  /// on negative probabilities or if they do not sum to 1 within 1e-12.
  explicit OffspringDistribution(std::vector<Atom> support);

  /// Point mass at k.
  static OffspringDistribution deterministic(std::uint32_t k);

  /// Parses "k:p,k:p,..." (e.g. "0:0.25,2:0.75"). A bare integer "k" is the
  /// point mass at k.
  static OffspringDistribution parse(std::string_view text);

  /// Leafless law with mean b >= 1: mass b - floor(b) at ceil(b) and the
  /// rest at floor(b).
  static OffspringDistribution with_mean(double b);

  std::span<const Atom> support() const { return support_; }
  double mean() const { return mean_; }
  double variance() const;
  /// True iff p(0) = 0.
  bool leafless() const { return support_.front().k > 0; }
  bool is_deterministic() const { return support_.size() == 1; }
  double probability(std::uint32_t k) const;
  std::uint32_t max_k() const { return support_.back().k; }

  /// Probability generating function G(s) = sum_k p_k s^k.
  double pgf(double s) const;

  std::uint32_t sample(RngStream& rng) const;

  /// Law of the number of children that survive independent removal with
  /// probability eta each (binomial thinning).
  OffspringDistribution thinned(double eta) const;

  /// Inverse of parse(), with round-trip precision.
  std::string to_string() const;

  friend bool operator==(const OffspringDistribution& a, const OffspringDistribution& b);

 private:
  std::vector<Atom> support_;
  std::vector<double> cumulative_;
  double mean_ = 0.0;
};

}  // namespace vrjp
