#pragma once

#include <stdexcept>
#include <string>

namespace pcecv {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid configuration or parameters (bad marginal params, bad train config,
// malformed run config). CLI exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Invalid data: parse failures, values outside a marginal's support, domain
// violations of benchmark functions. CLI exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: singular systems, degenerate leverage, training that
// yields no admissible model, undefined metrics. CLI exit code 4.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Rank-deficient / ill-conditioned least-squares system. Carries the
// condition-number estimate that triggered the rejection.
class SingularError : public NumericalError {
 public:
  SingularError(const std::string& what, double condition_estimate)
      : NumericalError(what), condition_estimate_(condition_estimate) {}

  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

}  // namespace pcecv
