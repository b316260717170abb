#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "ratcov/core_trig.hpp"
#include "ratcov/grid.hpp"
#include "ratcov/grid_transform.hpp"

namespace ratcov {

struct SolverOptions {
  double grad_tol = 1e-10;      ///< relative to ||c||_inf
  int max_iter = 200;
  double boundary_tol = 1e-8;   ///< tau_b, relative zero-set threshold
  double ls_shrink = 0.5;
  double ls_c1 = 1e-4;
  bool cone_check = true;       ///< run the sampled dual-cone test first

  /// Throws DomainError when a field is out of range.
  void validate() const;
};

/// Point mass at grid point `point`; `weight` is in moment units, so it
/// contributes weight * zeta^k to the k-th moment.
struct Mass {
  std::vector<int> point;
  double weight = 0.0;
};

struct SolverResult {
  HermitianSeq q_hat;
  HermitianSeq c_residual;  ///< c minus the grid moments of P / Q_hat
  std::vector<Mass> masses;
  int iterations = 0;
  double grad_norm = 0.0;
  bool on_boundary = false;
  double objective = 0.0;
  double mass_residual = 0.0;       ///< ||c_residual - moments of masses||_inf
  bool masses_approximate = false;  ///< mass fit missed its tolerance
};

/// <c,q> - (1/prod N) sum_l P log Q with P log Q := 0 where P = 0.
/// Returns +inf when Q = 0 at a point with P > 0; throws DomainError when Q < 0.
double objective(const TrigPoly& p, const HermitianSeq& c, const HermitianSeq& q, const Grid& grid);

/// g_k = c_k - (grid moments of P/Q)_k.
HermitianSeq gradient(const TrigPoly& p, const HermitianSeq& c, const HermitianSeq& q, const Grid& grid);

/// Hessian in the to_real_vector coordinates of q: entries are built from
/// the grid moments of P/Q^2.
Eigen::MatrixXd hessian(const TrigPoly& p, const HermitianSeq& q, const Grid& grid);

/// Minimizes the discrete dual functional over Q nonnegative on the grid.
/// Throws ConeError when c fails the sampled dual-cone test, AliasingError
/// when the grid is too coarse and ConvergenceError when Newton stalls or
/// runs out of iterations.
SolverResult solve(const TrigPoly& p, const HermitianSeq& c, const Grid& grid, const SolverOptions& opts = {});

/// Nonnegative weights on Z = {l : Q_hat(zeta_l) < tau_b ||Q_hat||_inf}
/// reproducing c_residual, by NNLS. `residual` receives the fit residual.
std::vector<Mass> singular_masses(const HermitianSeq& q_hat, const HermitianSeq& c_residual, const Grid& grid,
                                  const SolverOptions& opts = {}, double* residual = nullptr);

/// Masses with the grid sample of the absolutely continuous part removed:
/// w - Phi(zeta_l) / prod N, where Phi = P / Q_hat is extended continuously
/// into the zero by averaging it at theta +- h e_j. Discrete masses on a
/// grid carry that extra sample, which vanishes only as N grows.
std::vector<double> continuum_masses(const TrigPoly& p, const SolverResult& r, const Grid& grid, double h = 1e-3);

struct ConvergenceRow {
  std::vector<int> dims;
  double distance = 0.0;  ///< sup over the finest grid of |Q_N - Q_ref|
};

/// Solves on each grid and compares against the last (finest) one.
std::vector<ConvergenceRow> convergence_study(const TrigPoly& p, const HermitianSeq& c,
                                              const std::vector<Grid>& grids, const SolverOptions& opts = {});

}  // namespace ratcov
