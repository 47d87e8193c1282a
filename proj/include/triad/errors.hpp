#pragma once

#include <stdexcept>
#include <string>

namespace triad {

// Base of every error thrown by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inputs violate a documented precondition (negative rate, bad grid, ...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// Stokes above threshold, diverging trajectory, singular flow graph.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

// Signal-flow-graph determinant vanished at the evaluation frequency.
class SingularGraph : public InstabilityError {
 public:
  using InstabilityError::InstabilityError;
};

// Referred noise diverges because the conversion efficiency is zero.
class UnboundedNoise : public Error {
 public:
  using Error::Error;
};

// A fit hit its iteration cap or could not be initialized.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Malformed configuration or input data file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidParameter(what);
}

}  // namespace detail
}  // namespace triad
