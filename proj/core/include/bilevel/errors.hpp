#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace bilevel {

/// Bad argument to a pure operation (dimension mismatch, nonpositive step, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A problem lacks an oracle the requested operation needs.
class MissingOracle : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solver configuration is incompatible with the problem.
class InvalidConfiguration : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterate left the finite region or exceeded the divergence threshold.
/// Carries the last finite state so callers can inspect it.
class Diverged : public std::runtime_error {
 public:
  Diverged(const std::string& what, Eigen::VectorXd last_state, int iteration)
      : std::runtime_error(what), last_state_(std::move(last_state)), iteration_(iteration) {}

  const Eigen::VectorXd& last_state() const noexcept { return last_state_; }
  int iteration() const noexcept { return iteration_; }

 private:
  Eigen::VectorXd last_state_;
  int iteration_;
};

/// The prox-linear subproblem solver ran out of iterations before certifying the gap.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, double achieved_gap)
      : std::runtime_error(what), achieved_gap_(achieved_gap) {}

  double achieved_gap() const noexcept { return achieved_gap_; }

 private:
  double achieved_gap_;
};

}  // namespace bilevel
