#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "ratcov/core_trig.hpp"
#include "ratcov/dual_solver.hpp"
#include "ratcov/grid.hpp"

namespace ratcov {

inline constexpr double kDefaultLambda = 1e-2;

struct JointResult {
  HermitianSeq p_hat;
  HermitianSeq q_hat;
  double lambda = 0.0;
  double cov_residual = 0.0;   ///< ||c - moments(P/Q)||_inf
  HermitianSeq ceps_residual;  ///< eps_k = moments(log P/Q)_k - gamma_k; eps_0 := 0
  bool interior = true;
  bool converged = false;
  int iterations = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
};

/// <c,q> - <gamma,p> + (1/prod N) sum_l [P log(P/Q) - lambda log P].
/// Requires p_0 = 1 and gamma_0 = 1; returns +inf off the feasible set.
double joint_objective(const HermitianSeq& p, const HermitianSeq& q, const HermitianSeq& c,
                       const HermitianSeq& gamma, double lambda, const Grid& grid);

struct JointGradient {
  HermitianSeq gp;  ///< zero entry unused (p_0 is fixed) and set to 0
  HermitianSeq gq;
};

/// gq = c - m(P/Q); gp_k = m(log(P/Q))_k - gamma_k - lambda m(1/P)_k for k != 0.
JointGradient joint_gradient(const HermitianSeq& p, const HermitianSeq& q, const HermitianSeq& c,
                             const HermitianSeq& gamma, double lambda, const Grid& grid);

/// Hessian in the stacked coordinates [p without its zero entry, q], both in
/// to_real_vector layout.
Eigen::MatrixXd joint_hessian(const HermitianSeq& p, const HermitianSeq& q, double lambda, const Grid& grid);

/// Minimizes the joint functional over (P, Q) with p_0 = 1. For lambda = 0 a
/// stall at the boundary is reported through `interior = false` instead of
/// an exception.
JointResult solve_joint(const HermitianSeq& c, const HermitianSeq& gamma, double lambda, const Grid& grid,
                        const SolverOptions& opts = {});

/// Maximum-entropy solve: the dual solver with P = 1.
SolverResult me_solve(const HermitianSeq& c, const Grid& grid, const SolverOptions& opts = {});

/// ceil(sqrt(2) n_j) per component.
std::vector<int> me_degree(std::span<const int> n);

}  // namespace ratcov
