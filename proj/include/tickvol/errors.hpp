#pragma once

#include <stdexcept>
#include <string>

namespace tickvol {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter curve evaluated to a non-finite or non-positive value.
class InvalidCurveError : public Error {
 public:
  using Error::Error;
};

// Pre-averaging weight function violates g(0) = g(1) = 0.
class InvalidWeightError : public Error {
 public:
  using Error::Error;
};

// Numerical domain violation (e.g. a non-positive price after rounding).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A tick window or pre-averaging block runs past the series.
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

// Evaluation point too close to the edge of [0, 1] for the bandwidth.
class BoundaryError : public Error {
 public:
  using Error::Error;
};

// Estimator ratio with a vanishing denominator.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class EmptySeriesError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Too many replications of a Monte Carlo scenario failed.
class ScenarioAbortedError : public Error {
 public:
  using Error::Error;
};

}  // namespace tickvol
