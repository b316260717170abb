#pragma once

#include <array>
#include <vector>

#include "ratcov/core_trig.hpp"
#include "ratcov/grid.hpp"
#include "ratcov/grid_transform.hpp"

namespace ratcov::fixtures {

using Filter3 = std::array<std::array<double, 3>, 3>;

/// Numerator b and denominator a of the 2D recursive test filter,
/// b(theta) = sum_k B[k1][k2] e^{-i(k, theta)}.
const Filter3& filter_numerator();
const Filter3& filter_denominator();

/// |b/a|^2 sampled on `grid` (two-dimensional).
DiscreteSpectrum filter_spectrum(const Grid& grid);

/// Autocorrelation r_m = sum_l M[l + m] M[l] of a 3x3 coefficient array on
/// the (2,2) box, so that |m(theta)|^2 = sum r_k e^{-i(k, theta)}.
HermitianSeq autocorrelation(const Filter3& m);

/// 1 / (2 - cos theta_2) on a two-dimensional grid.
DiscreteSpectrum reciprocal_cos_spectrum(const Grid& grid);

/// Known-answer rational covariance problem with prior P and exact
/// (continuous) moments c of P / Q_true.
struct ConvergenceFixture {
  TrigPoly prior;
  HermitianSeq c;
  HermitianSeq q_true;
  std::vector<Grid> grids;  ///< study grids, coarse to fine
  Grid reference;
};

/// 1D AR(1) with rho = 0.95, P = 1, degree 1.
ConvergenceFixture ar1_fixture();
/// Separable AR(1) x AR(1) denominator (rho = 0.95) with a non-separable
/// prior on the (1,1) box.
ConvergenceFixture ar2d_fixture();

}  // namespace ratcov::fixtures
