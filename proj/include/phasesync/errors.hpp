#pragma once

#include <stdexcept>
#include <string>

namespace phasesync {

// Base type for all errors thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Operands have incompatible or empty dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A configuration value violates its documented range.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An iterative method exhausted its iteration budget.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_value, double residual,
                   int iterations)
      : Error(what),
        best_value(best_value),
        residual(residual),
        iterations(iterations) {}

  double best_value;
  double residual;
  int iterations;
};

// A non-finite value (NaN/Inf) appeared during iteration.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, int iteration = -1)
      : Error(what), iteration(iteration) {}

  int iteration;
};

// The fallback vector is (numerically) orthogonal to the leading eigenvector.
class DegenerateFallbackError : public Error {
 public:
  using Error::Error;
};

// Filesystem-level failure (open/read/write).
class IoError : public Error {
 public:
  using Error::Error;
};

// File exists but its contents cannot be parsed as the expected format.
class FormatError : public Error {
 public:
  using Error::Error;
};

// File declares a format version this build does not support.
class VersionError : public Error {
 public:
  using Error::Error;
};

// Payload checksum does not match the stored digest.
class ChecksumError : public Error {
 public:
  using Error::Error;
};

// A trace and an instance that should describe the same run do not agree.
class MismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace phasesync
