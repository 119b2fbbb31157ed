#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wavespec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "error"; }
};

/// State left the region where the diffusion matrix is strongly elliptic.
class ParabolicityError : public Error {
 public:
  explicit ParabolicityError(const std::string& what, double location = 0.0)
      : Error(what), location_(location) {}
  const char* kind() const noexcept override { return "parabolicity"; }
  double location() const noexcept { return location_; }

 private:
  double location_;
};

/// Iterative solver failed to converge; carries the residual history.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> history = {})
      : Error(what), history_(std::move(history)) {}
  const char* kind() const noexcept override { return "convergence"; }
  const std::vector<double>& history() const noexcept { return history_; }
  double last_residual() const noexcept { return history_.empty() ? -1.0 : history_.back(); }

 private:
  std::vector<double> history_;
};

/// Step size underflow in an explicit integrator.
class StiffnessError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "stiffness"; }
};

/// Root bracket does not change sign.
class BracketError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "bracket"; }
};

/// Singular Jacobian in a boundary-value solve, usually near a fold.
class FoldProximityError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "fold-proximity"; }
};

/// Least-squares fit too poor to trust; densify the samples.
class UnreliableFitError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "unreliable-fit"; }
};

/// A species that must stay positive reached zero during a simulation.
class PositivityError : public Error {
 public:
  PositivityError(const std::string& what, double time, double location)
      : Error(what), time_(time), location_(location) {}
  const char* kind() const noexcept override { return "positivity"; }
  double time() const noexcept { return time_; }
  double location() const noexcept { return location_; }

 private:
  double time_;
  double location_;
};

/// Invalid argument or precondition violation.
class InvalidArgument : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid-argument"; }
};

}  // namespace wavespec
