#pragma once

#include <stdexcept>
#include <string>

namespace pcsft {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (dimensions, normalization, symmetry).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Two independent evaluation routes of the same identity disagreed.
/// This always signals a linear-algebra bug, never bad input.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// A covariance candidate has an eigenvalue below the PSD tolerance.
class NotPositiveSemidefinite : public Error {
 public:
  NotPositiveSemidefinite(const std::string& what, double deficit)
      : Error(what), deficit_(deficit) {}

  /// Amount that must be added to the diagonal to reach the PSD boundary.
  double deficit() const noexcept { return deficit_; }

 private:
  double deficit_;
};

/// The intrinsic covariance of an entangled state is indefinite, so the field
/// cannot be split into an intrinsic part plus independent white noise.
class InseparableBackground : public Error {
 public:
  InseparableBackground(const std::string& what, double lambda_min)
      : Error(what), lambda_min_(lambda_min) {}

  double lambda_min() const noexcept { return lambda_min_; }

 private:
  double lambda_min_;
};

}  // namespace pcsft
