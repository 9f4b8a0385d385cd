#pragma once

#include <stdexcept>
#include <string>

namespace nade {

// Base error for malformed input, bad arguments or unreadable files.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Checkpoint and corpus/vocabulary disagree.
class CompatibilityError : public Error {
 public:
  using Error::Error;
};

// A NaN or infinity showed up in parameters, activations or updates.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace nade
