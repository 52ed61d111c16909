#pragma once

#include <stdexcept>

namespace starkloop {

// Base class for all failures raised by this library. Everything thrown on
// purpose derives from Error; anything else escaping is a bug.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside its documented domain (negative rate, theta out of range, ...).
struct DomainError : Error {
  using Error::Error;
};

// Matrix/vector of the wrong shape.
struct DimensionError : Error {
  using Error::Error;
};

// Index outside a valid range (harmonic order, branch interval, ...).
struct RangeError : Error {
  using Error::Error;
};

// Singular or numerically unusable linear system. The message carries a
// reciprocal condition estimate.
struct SolverError : Error {
  using Error::Error;
};

// A solve finished but its a-posteriori residual exceeds the tolerance.
struct ResidualError : Error {
  using Error::Error;
};

// Time integration failed (step-size underflow, trace drift).
struct IntegrationError : Error {
  using Error::Error;
};

// Demodulation window does not span an integer number of drive periods.
struct WindowError : Error {
  using Error::Error;
};

// Degenerate estimator input (zero phasor).
struct EstimatorError : Error {
  using Error::Error;
};

// No usable monotone branch of a response map.
struct BranchError : Error {
  using Error::Error;
};

// Invalid discretized bias distribution (non-positive node, bad weights).
struct DistributionError : Error {
  using Error::Error;
};

// A ratio-type metric whose reference value vanishes.
struct UndefinedMetricError : Error {
  using Error::Error;
};

// Flat or degenerate objective in an optimization.
struct DegenerateError : Error {
  using Error::Error;
};

// Configuration parse or validation failure. The message names the offending key.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace starkloop
