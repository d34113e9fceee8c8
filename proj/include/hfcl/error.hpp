#pragma once

#include <stdexcept>
#include <string>

namespace hfcl {

// Base for every error the simulator raises deliberately.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor / batch shapes disagree with the model or with each other.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A NaN or infinity showed up in parameters or intermediates.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents (bad IDX magic, label out of range).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Two inputs that must agree do not (image vs. label counts).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Invalid experiment or protocol configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hfcl
