#pragma once

#include <stdexcept>
#include <string>

namespace vgmm {

// Malformed input: bad dimensions, invalid weights, schema violations.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iteration caps, singular or indefinite matrices.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotPsdError : public NumericalError {
 public:
  NotPsdError(const std::string& what, double eigenvalue)
      : NumericalError(what), eigenvalue_(eigenvalue) {}
  double eigenvalue() const { return eigenvalue_; }

 private:
  double eigenvalue_;
};

class SingularCovarianceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Raised where a feasible coupling is required but the restricted polytope is
// empty. Functions that can legitimately report infeasibility return
// std::optional instead.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vgmm
