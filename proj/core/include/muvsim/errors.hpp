#pragma once

#include <stdexcept>
#include <string>

namespace muvsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument or configuration value.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Malformed or incompatible container / sidecar / CSV.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Container content does not match its own size or checksum records.
class CorruptionError : public FormatError {
 public:
  using FormatError::FormatError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace muvsim
