#pragma once

#include <stdexcept>
#include <string>

namespace mata {

/// Bad arguments or malformed input data. The CLI maps this to exit code 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to reach its contract. Exit code 1 in the CLI.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive quadrature ran out of subdivisions. Carries what it had so far.
class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& what, double partial_value, double achieved_error)
      : NumericalError(what), partial_value_(partial_value), achieved_error_(achieved_error) {}

  double partial_value() const noexcept { return partial_value_; }
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double partial_value_;
  double achieved_error_;
};

}  // namespace mata
