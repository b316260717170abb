// Shared generators and slow oracles for the unit tests.
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "ratcov/core_trig.hpp"
#include "ratcov/grid.hpp"
#include "ratcov/grid_transform.hpp"

namespace testing {

using ratcov::Complex;
using ratcov::Grid;
using ratcov::HermitianSeq;
using ratcov::IndexSet;
using ratcov::MultiIndex;
using ratcov::TrigPoly;

inline std::mt19937_64& rng(std::uint64_t seed = 0) {
  static std::mt19937_64 gen(20240611);
  if (seed) gen.seed(seed);
  return gen;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }
inline double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng()); }

inline HermitianSeq random_seq(const IndexSet& set, bool real = false) {
  std::vector<Complex> half(set.half().size());
  for (auto& v : half) v = Complex(normal(), real ? 0.0 : normal());
  return HermitianSeq(set, normal(), std::move(half));
}

// |a|^2 for a random a supported on [0, n]^d: nonnegative by construction.
inline HermitianSeq random_square(const IndexSet& set, bool real = false) {
  const auto& n = set.degree();
  const std::size_t d = set.dim();
  std::vector<MultiIndex> support;
  MultiIndex l(d, 0);
  for (;;) {
    support.push_back(l);
    std::size_t j = 0;
    while (j < d && ++l[j] > n[j]) l[j++] = 0;
    if (j == d) break;
  }
  std::vector<Complex> a(support.size());
  for (auto& v : a) v = Complex(normal(), real ? 0.0 : normal());
  return HermitianSeq::from_function(set, [&](const MultiIndex& k) {
    Complex acc = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
      for (std::size_t j = 0; j < support.size(); ++j) {
        bool hit = true;
        for (std::size_t t = 0; t < d; ++t) hit = hit && support[i][t] - support[j][t] == k[t];
        if (hit) acc += a[i] * std::conj(a[j]);
      }
    }
    return acc;
  }, 1e-10);
}

// Strictly positive polynomial: |a|^2 plus a margin relative to its size.
inline HermitianSeq random_positive(const IndexSet& set, double margin = 0.3, bool real = false) {
  auto s = random_square(set, real);
  return s + HermitianSeq::delta(set, margin * s.zero());
}

inline double eval_at(const HermitianSeq& p, const std::vector<double>& theta) {
  return ratcov::eval_direct(TrigPoly(p), theta);
}

// Quadratic-time grid moments: (1/N) sum_l zeta_l^k s(l).
inline Complex direct_moment(const std::vector<double>& s, const Grid& grid, const MultiIndex& k) {
  Complex acc = 0.0;
  for (std::size_t o = 0; o < grid.total(); ++o) {
    const auto t = grid.angles(o);
    double ph = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j) ph += k[j] * t[j];
    acc += std::polar(1.0, ph) * s[o];
  }
  return acc / static_cast<double>(grid.total());
}

inline std::vector<double> values_of(const HermitianSeq& p, const Grid& grid) {
  std::vector<double> v(grid.total());
  for (std::size_t o = 0; o < grid.total(); ++o) v[o] = eval_at(p, grid.angles(o));
  return v;
}

// Levinson-Durbin: AR coefficients a (a_0 = 1) and innovation variance.
inline std::pair<std::vector<double>, double> levinson(const std::vector<double>& r) {
  std::vector<double> a{1.0};
  double err = r[0];
  for (std::size_t m = 1; m < r.size(); ++m) {
    double acc = r[m];
    for (std::size_t i = 1; i < m; ++i) acc += a[i] * r[m - i];
    const double k = -acc / err;
    std::vector<double> next(m + 1, 0.0);
    next[0] = 1.0;
    for (std::size_t i = 1; i < m; ++i) next[i] = a[i] + k * a[m - i];
    next[m] = k;
    a = next;
    err *= 1.0 - k * k;
  }
  return {a, err};
}

}  // namespace testing
