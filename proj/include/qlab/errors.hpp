#pragma once

#include <stdexcept>
#include <string>

namespace qlab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluation exactly at (or numerically on top of) a pole.
struct PoleError : Error {
  using Error::Error;
};

// Requested accuracy cannot be reached within the configured budget.
struct PrecisionError : Error {
  using Error::Error;
};

// Argument outside the documented domain (lower half plane, non-coprime, ...).
struct DomainError : Error {
  using Error::Error;
};

// Adaptive subdivision or extrapolation failed to settle.
struct ConvergenceError : Error {
  using Error::Error;
};

// Sampled integrand exceeded the caller-declared decay envelope.
struct EnvelopeError : Error {
  using Error::Error;
};

// Parameters beyond the supported desk-scale range.
struct GateError : Error {
  using Error::Error;
};

}  // namespace qlab
