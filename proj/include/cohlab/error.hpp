#pragma once

#include <stdexcept>

namespace cohlab {

/// Raised when a computation hits a numerically degenerate configuration,
/// e.g. a tangent space of lower rank than the variety dimension.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for malformed descriptors and files.
class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace cohlab
