#pragma once

#include <stdexcept>
#include <string>

namespace ctsplit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform (e.g. dim(x) != cols(A)).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A scalar parameter is outside its admissible range (step size <= 0, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A point lies outside the domain of a subdifferential.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Power iteration ran out of iterations; carries the last estimate.
class EstimationFailure : public Error {
 public:
  EstimationFailure(const std::string& what, double last_estimate)
      : Error(what), last_estimate_(last_estimate) {}
  double last_estimate() const noexcept { return last_estimate_; }

 private:
  double last_estimate_;
};

class IndefiniteMetricError : public Error {
 public:
  using Error::Error;
};

class SingularSystemError : public Error {
 public:
  using Error::Error;
};

/// An oracle could not certify its own answer. Indicates a test bug.
class OracleFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace ctsplit
