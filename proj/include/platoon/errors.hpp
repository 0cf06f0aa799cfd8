#pragma once

#include <stdexcept>
#include <string>

namespace platoon {

/// Root of every error thrown by the library. `exit_code()` follows the CLI
/// contract: 2 configuration, 3 numeric failure, 4 measurement infeasible.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 3; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

class NumericError : public Error {
 public:
  using Error::Error;
};

/// A delayed lookup asked for a time after the newest committed sample.
class LookaheadError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ArgumentOrderError : public NumericError {
 public:
  using NumericError::NumericError;
};

class RangeError : public NumericError {
 public:
  using NumericError::NumericError;
};

class DegenerateGainError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class SingularFrequencyError : public NumericError {
 public:
  using NumericError::NumericError;
};

class MeasurementError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

}  // namespace platoon
