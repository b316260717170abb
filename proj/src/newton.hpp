#pragma once

// Damped Newton with Armijo backtracking, shared by the dual and joint solvers.

#include <Eigen/Dense>

#include <functional>

#include "ratcov/dual_solver.hpp"

namespace ratcov::detail {

struct NewtonProblem {
  /// Objective; +inf outside the feasible set.
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  /// Search direction for the current point and gradient (normally -H^{-1} g).
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> direction;
  /// Optional early exit checked after every accepted step.
  std::function<bool(const Eigen::VectorXd&)> halt;
};

struct NewtonOutcome {
  Eigen::VectorXd x;
  Eigen::VectorXd grad;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  bool stalled = false;  ///< line search could not make progress
  bool halted = false;
};

/// Iterates until ||g||_inf <= gtol, max_iter, a stalled line search or halt().
NewtonOutcome newton_minimize(const NewtonProblem& prob, Eigen::VectorXd x, double gtol,
                              const SolverOptions& opts);

/// Solves H d = -g by Cholesky, retrying with a growing diagonal shift when H
/// is singular or indefinite.
Eigen::VectorXd newton_direction(const Eigen::MatrixXd& h, const Eigen::VectorXd& g);

/// Preconditioned CG for H d = -g with a Jacobi preconditioner.
Eigen::VectorXd cg_direction(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& hv,
                             const Eigen::VectorXd& diag, const Eigen::VectorXd& g, double rtol = 1e-12,
                             int max_iter = 2000);

/// Dense assembly is used up to this many real coordinates; CG above it.
inline constexpr long kDenseLimit = 4096;

}  // namespace ratcov::detail
