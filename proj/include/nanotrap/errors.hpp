#pragma once

#include <stdexcept>
#include <string>

namespace nanotrap {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration: bad builder parameters, mismatched list lengths,
/// out-of-range arguments. Maps to CLI exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Geometry that cannot form a scene (non-positive spacing, coincident
/// segment endpoints, zero direction vector).
class InvalidGeometryError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Located scene-config parse failure; carries the 1-based line number.
class ParseError : public ConfigError {
 public:
  ParseError(int line, const std::string& what)
      : ConfigError("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Malformed grid file (bad magic, bad header, truncated or oversized payload).
class FormatError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// DRESSED potential requested with omega_rf = 0.
class ModeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Numerical failure. Maps to CLI exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Evaluation point on a wire axis.
class SingularityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Barrier endpoints lie in disconnected unmasked components.
class NoPathError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace nanotrap
