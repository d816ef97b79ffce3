#pragma once

#include <stdexcept>
#include <string>

namespace arcflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Degenerate or malformed polyline (zero-length segment, too few nodes, NaN).
class InvalidCurve : public Error {
 public:
  using Error::Error;
};

/// Support curve violating convexity or closedness.
class InvalidSupport : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent combination of otherwise valid inputs.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Configuration document problems; carries the offending field path.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace arcflow
