#pragma once

#include <stdexcept>
#include <string>

namespace lomv {

/// Invalid problem data or configuration supplied by the caller.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation broke down numerically (e.g. a non-positive active weight).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lomv
