#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dftr {

/// A physical or numerical parameter is outside its admissible domain.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A caller broke an operation precondition (grid mismatch, BC violation, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An iterative solver failed to converge.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double last_residual)
      : std::runtime_error(what), last_residual_(last_residual) {}

  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

/// Time integration produced a non-finite state or cannot proceed.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, std::size_t step)
      : std::runtime_error(what), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Not enough usable data to fit a decay rate.
class EstimationError : public std::runtime_error {
 public:
  EstimationError(const std::string& what, std::size_t usable)
      : std::runtime_error(what), usable_(usable) {}

  std::size_t usable_records() const noexcept { return usable_; }

 private:
  std::size_t usable_;
};

}  // namespace dftr
