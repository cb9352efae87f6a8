#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cpdkit {

// Input shapes disagree (non-square matrix, vector length != matrix order).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input violates a documented precondition (non-finite entry, asymmetry,
// bad model parameter, wrong rho[0] normalization, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Exact enumeration requested above the configured cap.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative dynamics ran out of sweeps. Carries the state reached so far.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<int> state)
      : std::runtime_error(what), state_(std::move(state)) {}
  const std::vector<int>& state() const noexcept { return state_; }

 private:
  std::vector<int> state_;
};

// A certificate failed its own re-verification. Never expected in practice.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace cpdkit
