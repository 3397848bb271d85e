#pragma once

#include <stdexcept>
#include <string>

namespace loadseg {

// Base for every error raised by the library. The CLI maps the concrete
// subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid detector, threshold, or run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input data: CSV schema violations, bad labels, empty series.
class DataError : public Error {
 public:
  using Error::Error;
};

// Threshold optimization or model selection could not produce a result.
class OptimizationError : public Error {
 public:
  using Error::Error;
};

}  // namespace loadseg
