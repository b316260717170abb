// Randomized invariants over hand-rolled generators.
#include <doctest.h>

#include <Eigen/Dense>

#include "ratcov/dual_solver.hpp"
#include "support.hpp"

using namespace ratcov;
using namespace testing;

TEST_CASE("evaluation is real for hermitian input") {
  const auto set = make_box_index_set({2, 2});
  for (int trial = 0; trial < 10000; ++trial) {
    const auto p = random_seq(set);
    const std::vector<double> th{uniform(-M_PI, M_PI), uniform(-M_PI, M_PI)};
    Complex acc = 0.0;
    for (const auto& k : set.indices()) acc += p[k] * std::polar(1.0, -(k[0] * th[0] + k[1] * th[1]));
    REQUIRE(std::abs(acc.imag()) <= 1e-12 * p.abs_sum());
  }
}

TEST_CASE("coefficient bounds on random nonnegative polynomials") {
  for (int trial = 0; trial < 1000; ++trial) {
    const int n1 = 1 + trial % 3;
    const int n2 = trial % 2;
    const auto set = make_box_index_set({n1, n2});
    const Grid grid({4 * n1 + 4, 4 * n2 + 4});
    REQUIRE(coeff_bounds_check(TrigPoly(random_square(set, trial % 2 == 0)), grid));
  }
}

TEST_CASE("grid moments of positive spectra lie in the dual cone") {
  const auto set = make_box_index_set({2, 1});
  const Grid grid({8, 6});
  std::vector<double> s(grid.total());
  for (double& v : s) v = uniform(0.05, 3.0);
  const auto c = moments_on_grid(DiscreteSpectrum(grid, s), set);
  for (int trial = 0; trial < 200; ++trial) {
    // random q made nonnegative on the grid by lifting its minimum to zero
    auto q = random_seq(set);
    const auto qv = eval_on_grid(TrigPoly(q), grid);
    q = q - HermitianSeq::delta(set, qv.min());
    CHECK(inner_product(c, q) > 0.0);
  }
}

TEST_CASE("dual objective is convex, coercive and has a PSD hessian") {
  const auto set = make_box_index_set({1, 1});
  const Grid grid({10, 10});
  const TrigPoly p(random_positive(set));
  const auto c = moments_on_grid(eval_on_grid(TrigPoly(random_positive(set)), grid), set);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_positive(set, 0.1);
    const auto b = random_positive(set, 0.1);
    const auto mid = 0.5 * (a + b);
    const double fa = objective(p, c, a, grid);
    const double fb = objective(p, c, b, grid);
    CHECK(objective(p, c, mid, grid) <= 0.5 * (fa + fb) + 1e-10 * (std::abs(fa) + std::abs(fb)));

    double prev = objective(p, c, a, grid);
    bool rising = false;
    for (double t : {10.0, 100.0, 1000.0}) {
      const double f = objective(p, c, t * a, grid);
      rising = f > prev;
      prev = f;
    }
    CHECK(rising);
  }
  for (int trial = 0; trial < 20; ++trial) {
    const auto h = hessian(p, random_positive(set), grid);
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues().minCoeff() >= -1e-9 * h.norm());
  }
}

TEST_CASE("solution depends smoothly on the data") {
  const auto set = make_box_index_set({1, 1});
  const Grid grid({16, 16});
  const TrigPoly p(random_positive(set));
  const auto qt = random_positive(set);
  const auto pv = eval_on_grid(p, grid);
  const auto qv = eval_on_grid(TrigPoly(qt), grid);
  std::vector<double> r(grid.total());
  for (std::size_t o = 0; o < r.size(); ++o) r[o] = pv[o] / qv[o];
  const auto c = moments_on_grid(DiscreteSpectrum(grid, r), set);
  const auto base = solve(p, c, grid);
  const Eigen::MatrixXd h = hessian(p, base.q_hat, grid);
  const double inv_norm = 1.0 / Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues().minCoeff();
  REQUIRE(std::isfinite(inv_norm));
  for (int trial = 0; trial < 10; ++trial) {
    auto delta = random_seq(set, true);
    delta *= 1e-6 / delta.max_abs();
    const auto moved = solve(p, c + delta, grid);
    const double change = (moved.q_hat - base.q_hat).max_abs();
    // |dq| <= |H^-1| |dc| up to the norm conversions of the real layout
    CHECK(change <= 4.0 * inv_norm * std::sqrt(static_cast<double>(set.size())) * 1e-6);
  }
}
