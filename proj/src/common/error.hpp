#pragma once

#include <stdexcept>
#include <string>

namespace aep {

// Error taxonomy; mirrored one-to-one by the C API status codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad wiring: shape mismatches, unknown keys/ids, inconsistent options.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Operation called in the wrong order (step after done, backward before forward, ...).
class StateError : public Error {
 public:
  using Error::Error;
};

// Malformed data handed to an otherwise well-configured component.
class InputError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace aep
