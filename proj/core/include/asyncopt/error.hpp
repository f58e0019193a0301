#pragma once

#include <stdexcept>
#include <string>

namespace asyncopt {

/// Base class for every error raised by the library. Callers that only care
/// whether a run can continue catch this; the subclasses exist so tests can
/// pin the failure mode.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace asyncopt
