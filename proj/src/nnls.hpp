#pragma once

#include <Eigen/Dense>

namespace ratcov::detail {

/// Lawson-Hanson active-set NNLS: argmin ||A x - b||_2 subject to x >= 0.
/// The passive columns of the result are linearly independent, so the
/// support never exceeds rank(A).
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iter = 0);

}  // namespace ratcov::detail
