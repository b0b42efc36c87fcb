#pragma once

#include <stdexcept>
#include <string>

namespace gaussbv {

// Base of every error raised by the library. Callers that only need to know
// "something numerical failed" catch this; the CLI maps it to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (t < 0, p = 0 for
// the inverse cdf, |u| > 1 for the relaxed perimeter, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Singular or non-positive-definite covariance where a density is needed.
class DegenerateMeasureError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Grid too coarse, mismatched grids, schedule below the resolution floor.
class GridError : public Error {
 public:
  using Error::Error;
};

// Iterative method ran out of iterations. Carries the last residual so the
// caller can report how far off it was.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

}  // namespace gaussbv
