#pragma once

#include <stdexcept>
#include <string>

namespace vrjp {

/// Input outside an operation's domain (b <= 1, t < c, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Result not representable in double precision.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// An iterative method stopped before meeting its tolerance. Carries the
/// best estimate reached and its error estimate.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, double partial_estimate, double error_estimate)
      : std::runtime_error(what), partial_(partial_estimate), error_(error_estimate) {}

  double partial_estimate() const { return partial_; }
  double error_estimate() const { return error_; }

 private:
  double partial_;
  double error_;
};

/// Structural problem with the object a walk runs on.
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Too few Monte Carlo successes to report an estimate.
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vrjp
