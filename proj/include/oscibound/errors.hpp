// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace oscibound {

/// Rejected input: dimension mismatches, violated preconditions, bad files.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A requested grid would exceed the configured node budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, double lambda)
      : std::runtime_error(what), lambda_(lambda) {}
  double lambda() const noexcept { return lambda_; }

 private:
  double lambda_;
};

/// An iterative estimator stopped before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_value, double residual)
      : std::runtime_error(what), last_value_(last_value), residual_(residual) {}
  double last_value() const noexcept { return last_value_; }
  double residual() const noexcept { return residual_; }

 private:
  double last_value_;
  double residual_;
};

}  // namespace oscibound
