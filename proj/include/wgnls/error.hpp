#pragma once

#include <stdexcept>
#include <string>

namespace wgnls {

/// Raised when an operation receives a field in the wrong representation.
class SpaceMismatch : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised when a resolvent quadrature cannot meet the requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by the time stepper when the blow-up guard fires and the caller
/// asked for exceptions instead of an abort record.
class NumericalAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration or schema problems (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wgnls
