#pragma once

#include <stdexcept>
#include <string>

namespace smfg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated a precondition (bad index, mismatched grids, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain, e.g. a nonpositive density.
class DomainError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// Base for failures of the time integrator.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double time)
      : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Step size fell below the underflow threshold.
class StiffnessError : public IntegrationError {
 public:
  using IntegrationError::IntegrationError;
};

/// Right-hand side or state became non-finite.
class DivergenceError : public IntegrationError {
 public:
  using IntegrationError::IntegrationError;
};

}  // namespace smfg
