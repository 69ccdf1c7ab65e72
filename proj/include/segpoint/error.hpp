#pragma once

#include <stdexcept>
#include <string>

namespace segpoint {

/// Bad or inconsistent user input. The CLI maps this to exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A test that is undefined for the given class sizes (e.g. n_i <= 1).
class DegenerateClassError : public InputError {
 public:
  using InputError::InputError;
};

/// Numerical failure (non-PSD covariance, singular fit, ...). Exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace segpoint
