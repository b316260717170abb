#pragma once

// Real parameterizations of Hermitian sequences on a fixed (index set, grid)
// pair. The solvers optimize over coordinates x with q = sum_i x_i b_i.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

#include "ratcov/core_trig.hpp"
#include "ratcov/grid.hpp"
#include "ratcov/grid_transform.hpp"

namespace ratcov::detail {

/// True when the set is closed under flipping the sign of any one coordinate.
bool flip_closed(const IndexSet& set);
/// True when s is real and invariant under single-coordinate sign flips.
bool even_symmetric(const HermitianSeq& s, double tol = 1e-13);

class Coords {
 public:
  /// Hermitian layout: [zero, re h0, im h0, ...]. Even layout: one real
  /// coordinate per index in the nonnegative orthant, lexicographic.
  /// Without `with_zero` the element for k = 0 is dropped.
  Coords(IndexSet set, Grid grid, bool even, bool with_zero);

  std::size_t size() const { return elems_.size(); }
  bool even() const { return even_; }
  bool with_zero() const { return with_zero_; }
  const IndexSet& index_set() const { return set_; }
  const Grid& grid() const { return grid_; }

  /// sum_i x_i b_i + offset * delta_0.
  HermitianSeq expand(const Eigen::VectorXd& x, double offset = 0.0) const;
  /// Coordinates of s; the zero value is ignored when the zero element is absent.
  Eigen::VectorXd coordinates(const HermitianSeq& s) const;
  /// <s, b_i> for every element.
  Eigen::VectorXd project(const HermitianSeq& s) const;

  /// Grid values of sum_i x_i b_i + offset.
  std::vector<double> evaluate(const Eigen::VectorXd& x, double offset = 0.0) const;
  /// <m, b_i> with m the grid moments of `values` (no resolution check).
  Eigen::VectorXd project_values(std::span<const double> values) const;
  /// Hessian-vector product of the form project_values(S * evaluate(v)).
  Eigen::VectorXd apply(std::span<const double> s, const Eigen::VectorXd& v) const;

  /// H_ij = Re sum b_i(k) b_j(l) M_{-(k+l)} with rows from this and columns from `cols`.
  Eigen::MatrixXd gram(const GridMoments& m, const Coords& cols) const;
  Eigen::MatrixXd gram(const GridMoments& m) const { return gram(m, *this); }
  Eigen::VectorXd gram_diagonal(const GridMoments& m) const;

  /// Row of basis-function values B_i(zeta_l) at grid offset l.
  Eigen::RowVectorXd point_row(std::size_t offset) const;

 private:
  struct Term {
    std::size_t bin;
    std::size_t elem;
    Complex coeff;
    std::vector<int> residue;  // k_j mod N_j
  };
  struct Elem {
    std::vector<std::size_t> terms;
  };
  std::size_t neg_sum_bin(const Term& a, const Term& b) const;
  void add_term(std::size_t elem, const MultiIndex& k, Complex coeff);

  IndexSet set_;
  Grid grid_;
  bool even_;
  bool with_zero_;
  std::vector<Elem> elems_;
  std::vector<Term> terms_;
  std::vector<MultiIndex> keys_;  // representative index per element
  std::vector<int> part_;         // 0 zero/even, 1 real part, 2 imaginary part
  std::vector<std::size_t> strides_;
};

}  // namespace ratcov::detail
