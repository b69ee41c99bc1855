#pragma once

#include <stdexcept>
#include <string>

namespace reachkit {

// Base of every error the library throws. The CLI maps the subclasses onto
// exit codes: UsageError/ConfigError -> 2, ModelError -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller violated a precondition (dimension mismatch, bad index, bad pairing).
class UsageError : public Error {
 public:
  using Error::Error;
};

// A configuration or parameter set is incomplete or malformed.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The dynamics produced a non-finite value or hit a singularity.
class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace reachkit
