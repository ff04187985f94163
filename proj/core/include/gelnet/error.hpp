#pragma once

#include <stdexcept>
#include <string>

namespace gelnet {

/// Malformed or out-of-domain input (bad dimensions, negative lambda, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation hit a nonpositive pivot or denominator that the input
/// should have excluded (indefinite S, divergent warm start, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gelnet
