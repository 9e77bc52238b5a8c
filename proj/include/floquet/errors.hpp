#pragma once

#include <stdexcept>
#include <string>

namespace floquet {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs outside the domain of an operation (bad parameters, empty windows).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A ZTP predictor was asked for a position outside the first Floquet band.
class OutOfBandError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// The driven-only resonance condition has no root in (0, omega).
class NoRootError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Failures of the numerics themselves: singular systems, iterations that stall.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public NumericalError {
 public:
  SingularMatrixError(const std::string& what, std::size_t row)
      : NumericalError(what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : NumericalError(what), achieved_(achieved) {}
  /// Best error estimate reached before giving up.
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// A channel momentum could not be continued unambiguously along a pole search path.
class BranchJumpError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A continued-fraction denominator vanished.
class BreakdownError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace floquet
