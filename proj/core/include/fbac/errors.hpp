#pragma once

#include <stdexcept>
#include <string>

namespace fbac {

/// Precondition violated by the caller (bad index, point outside a grid,
/// invalid parameter range).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// |grad u| fell below the configured floor at a point where curvature
/// quantities were requested.
class DegenerateGradient : public std::runtime_error {
 public:
  DegenerateGradient(const std::string& what, double grad_norm)
      : std::runtime_error(what), grad_norm_(grad_norm) {}
  double grad_norm() const noexcept { return grad_norm_; }

 private:
  double grad_norm_;
};

/// A time step could not satisfy its acceptance test (corrector mismatch,
/// CFL bound).
class StepRejected : public std::runtime_error {
 public:
  StepRejected(const std::string& what, double measured)
      : std::runtime_error(what), measured_(measured) {}
  double measured() const noexcept { return measured_; }

 private:
  double measured_;
};

/// Malformed or unknown configuration entries.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fbac
