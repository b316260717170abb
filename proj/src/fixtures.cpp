#include "ratcov/fixtures.hpp"

#include <cmath>

#include "ratcov/error.hpp"

namespace ratcov::fixtures {

namespace {

constexpr double kRho = 0.95;

// Covariance of a unit-variance-innovation AR(1) with pole kRho.
double ar_cov(int m) { return std::pow(kRho, std::abs(m)) / (1.0 - kRho * kRho); }

}  // namespace

const Filter3& filter_numerator() {
  static const Filter3 b{{{0.9589, -0.0479, 0.0959}, {0.0959, 0.0479, 0.0959}, {-0.0959, 0.0479, 0.1918}}};
  return b;
}

const Filter3& filter_denominator() {
  static const Filter3 a{{{1.0, 0.1, 0.05}, {-0.1, 0.05, -0.05}, {0.2, -0.05, -0.1}}};
  return a;
}

DiscreteSpectrum filter_spectrum(const Grid& grid) {
  if (grid.dim() != 2) throw DomainError("filter spectrum lives on a two-dimensional grid");
  const auto& b = filter_numerator();
  const auto& a = filter_denominator();
  std::vector<double> v(grid.total());
  for (std::size_t o = 0; o < grid.total(); ++o) {
    const auto t = grid.angles(o);
    Complex bs = 0.0;
    Complex as = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const Complex e = std::polar(1.0, -(i * t[0] + j * t[1]));
        bs += b[i][j] * e;
        as += a[i][j] * e;
      }
    }
    v[o] = std::norm(bs) / std::norm(as);
  }
  return DiscreteSpectrum(grid, std::move(v));
}

HermitianSeq autocorrelation(const Filter3& m) {
  return HermitianSeq::from_function(make_box_index_set({2, 2}), [&](const MultiIndex& k) {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const int i2 = i - k[0];
        const int j2 = j - k[1];
        if (i2 >= 0 && i2 < 3 && j2 >= 0 && j2 < 3) acc += m[i][j] * m[i2][j2];
      }
    }
    return Complex(acc, 0.0);
  });
}

DiscreteSpectrum reciprocal_cos_spectrum(const Grid& grid) {
  if (grid.dim() != 2) throw DomainError("expected a two-dimensional grid");
  std::vector<double> v(grid.total());
  for (std::size_t o = 0; o < grid.total(); ++o) v[o] = 1.0 / (2.0 - std::cos(grid.angles(o)[1]));
  return DiscreteSpectrum(grid, std::move(v));
}

ConvergenceFixture ar1_fixture() {
  const IndexSet set = make_box_index_set({1});
  auto c = HermitianSeq::from_function(set, [](const MultiIndex& k) { return Complex(ar_cov(k[0]), 0.0); });
  HermitianSeq q(set, 1.0 + kRho * kRho, {Complex(-kRho, 0.0)});
  return {TrigPoly(HermitianSeq::delta(set)), std::move(c), std::move(q),
          {Grid({32}), Grid({64}), Grid({128}), Grid({256})}, Grid({4096})};
}

ConvergenceFixture ar2d_fixture() {
  const IndexSet set = make_box_index_set({1, 1});
  auto p = HermitianSeq::from_function(set, [](const MultiIndex& k) {
    if (k[0] == 0 && k[1] == 0) return Complex(1.0, 0.0);
    if (k[0] == 0 || k[1] == 0) return Complex(std::abs(k[0]) == 1 ? 0.1 : 0.05, 0.0);
    return Complex(k[0] == k[1] ? 0.1 : 0.05, 0.0);
  });
  // moments of P / Q_sep are P's coefficients convolved with r(m1) r(m2)
  auto c = HermitianSeq::from_function(set, [&](const MultiIndex& k) {
    Complex acc = 0.0;
    for (const auto& j : set.indices()) acc += p[j] * ar_cov(k[0] - j[0]) * ar_cov(k[1] - j[1]);
    return acc;
  });
  const double a0 = 1.0 + kRho * kRho;
  auto q = HermitianSeq::from_function(set, [&](const MultiIndex& k) {
    const double f0 = k[0] == 0 ? a0 : -kRho;
    const double f1 = k[1] == 0 ? a0 : -kRho;
    return Complex(f0 * f1, 0.0);
  });
  return {TrigPoly(std::move(p)), std::move(c), std::move(q),
          {Grid({32, 32}), Grid({64, 64}), Grid({128, 128}), Grid({256, 256})}, Grid({512, 512})};
}

}  // namespace ratcov::fixtures
