#pragma once

#include <stdexcept>

namespace fracollo {

/// Raised for singular or non-finite linear algebra and failed iterations.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for malformed or inconsistent configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fracollo
