#pragma once

#include <stdexcept>
#include <string>

namespace logtr {

// Incompatible extents, bad mode index, or operator/tensor mismatch.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid parameter value (non-positive penalty, even kernel, ...).
class ValueError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failure: non-finite values, broken conjugate symmetry,
// degenerate quantities such as a relative change against a zero tensor.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace logtr
