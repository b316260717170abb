#include <doctest.h>

#include <sstream>

#include "ratcov/error.hpp"
#include "ratcov/fixtures.hpp"
#include "support.hpp"

using namespace ratcov;
using namespace testing;

TEST_CASE("grid angles") {
  const Grid g({4, 6});
  CHECK(g.total() == 24);
  CHECK(g.theta(0, 2) == M_PI);
  CHECK(g.theta(0, 3) == doctest::Approx(-M_PI / 2));
  CHECK(g.theta(1, 0) == 0.0);
  CHECK(g.resolves(std::vector<int>{1, 2}));
  CHECK_FALSE(g.resolves(std::vector<int>{2, 2}));
  const int l[2] = {3, 5};
  CHECK(g.point(g.offset(l)) == std::vector<int>{3, 5});
  const int k[2] = {-1, -2};
  CHECK(g.bin(k) == g.offset(l) - 1);
  CHECK_THROWS_AS(Grid({0}), DomainError);
}

TEST_CASE("evaluation on the grid") {
  const auto one = make_box_index_set({1});
  const auto ones = eval_on_grid(TrigPoly(HermitianSeq::delta(make_box_index_set({1, 1}))), Grid({5, 3}));
  for (double v : ones.values()) CHECK(v == doctest::Approx(1.0));

  const auto v = eval_on_grid(TrigPoly(HermitianSeq(one, 2.0, {Complex(1.0, 0.0)})), Grid({4}));
  const double expect[4] = {4, 2, 0, 2};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(v[i] - expect[i]) < 1e-14);

  const auto set = make_box_index_set({3, 2});
  for (const auto& grid : {Grid({8, 8}), Grid({5, 7}), Grid({3, 2})}) {
    const auto p = random_seq(set);
    const auto fast = eval_on_grid(TrigPoly(p), grid);
    const auto slow = values_of(p, grid);
    for (std::size_t o = 0; o < grid.total(); ++o) CHECK(std::abs(fast[o] - slow[o]) <= 1e-10);
  }
}

TEST_CASE("grid moments") {
  const auto set = make_box_index_set({2, 2});
  const Grid grid({8, 8});
  const auto c = moments_on_grid(DiscreteSpectrum(grid, std::vector<double>(64, 1.0)), set);
  CHECK(c.zero() == doctest::Approx(1.0));
  for (auto v : c.half()) CHECK(std::abs(v) < 1e-15);

  // band-limited round trip
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = random_seq(set);
    const auto back = moments_on_grid(eval_on_grid(TrigPoly(p), grid), set);
    CHECK((back - p).max_abs() <= 1e-12);
  }

  // arbitrary spectrum against the quadratic-time oracle
  const Grid odd({7, 9});
  std::vector<double> s(odd.total());
  for (double& x : s) x = uniform(0.1, 2.0);
  const auto fast = moments_on_grid(DiscreteSpectrum(odd, s), set);
  for (const auto& k : set.indices()) CHECK(std::abs(fast[k] - direct_moment(s, odd, k)) <= 1e-13);

  CHECK_THROWS_AS(moments_on_grid(DiscreteSpectrum(Grid({4, 8}), std::vector<double>(32, 1.0)), set), AliasingError);
}

TEST_CASE("moments of 1/(2 - cos t2)") {
  const Grid grid({64, 64});
  const auto c = moments_on_grid(fixtures::reciprocal_cos_spectrum(grid), make_box_index_set({1, 1}));
  CHECK(std::abs(c[{0, 0}].real() - 1.0 / std::sqrt(3.0)) <= 1e-8);
  CHECK(std::abs(c[{0, 1}].real() - (-1.0 + 2.0 / std::sqrt(3.0))) <= 1e-8);
  CHECK(std::abs(c[{1, 0}]) <= 1e-14);
}

TEST_CASE("Parseval check for band-limited spectra") {
  const auto set = make_box_index_set({2, 2});
  const Grid grid({9, 11});
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = random_positive(set);
    const auto p = random_seq(set);
    const auto sv = eval_on_grid(TrigPoly(s), grid);
    const auto pv = eval_on_grid(TrigPoly(p), grid);
    double avg = 0.0;
    for (std::size_t o = 0; o < grid.total(); ++o) avg += sv[o] * pv[o];
    avg /= static_cast<double>(grid.total());
    CHECK(inner_product(moments_on_grid(sv, set), p) == doctest::Approx(avg).epsilon(1e-10));
  }
}

TEST_CASE("log moments") {
  const auto one = make_box_index_set({3});
  const auto z = log_moments_on_grid(DiscreteSpectrum(Grid({16}), std::vector<double>(16, 1.0)), one);
  CHECK(z.max_abs() == 0.0);

  const Grid grid({64});
  std::vector<double> s(64);
  for (std::size_t o = 0; o < 64; ++o) s[o] = std::exp(2.0 * std::cos(grid.theta(0, static_cast<int>(o))));
  const auto g = log_moments_on_grid(DiscreteSpectrum(grid, s), one);
  CHECK(std::abs(g[{1}] - 1.0) <= 1e-10);
  CHECK(std::abs(g[{2}]) <= 1e-10);

  s[5] = 0.0;
  try {
    log_moments_on_grid(DiscreteSpectrum(grid, s), one);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("5") != std::string::npos);
  }
}

TEST_CASE("full moments cover doubled indices") {
  const Grid grid({16, 12});
  std::vector<double> s(grid.total());
  for (double& x : s) x = uniform(0.5, 1.5);
  const auto m = full_moments(s, grid);
  for (const MultiIndex k : {MultiIndex{4, -3}, MultiIndex{-2, 5}, MultiIndex{0, 0}}) {
    CHECK(std::abs(m.at(k) - direct_moment(s, grid, k)) <= 1e-13);
  }
}

TEST_CASE("sampled dual cone") {
  const auto set = make_box_index_set({1, 1});
  const Grid grid({8, 8});
  const auto c = moments_on_grid(eval_on_grid(TrigPoly(random_positive(set)), grid), set);
  CHECK(sampled_dual_cone_check(c, grid, 200));
  CHECK_FALSE(sampled_dual_cone_check(HermitianSeq::delta(set, -1.0), grid));
  // |c_1| > c_0 is outside the cone
  const HermitianSeq far(make_box_index_set({1}), 1.0, {Complex(2.0, 0.0)});
  CHECK_FALSE(sampled_dual_cone_check(far, Grid({16}), 200));
}

TEST_CASE("dspec round trip") {
  const Grid grid({3, 5});
  std::vector<double> v(grid.total());
  for (double& x : v) x = normal();
  std::stringstream ss;
  write_dspec(ss, DiscreteSpectrum(grid, v));
  std::string header;
  std::getline(ss, header);
  CHECK(header.find("\"dims\"") != std::string::npos);
  ss.seekg(0);
  const auto back = read_dspec(ss);
  CHECK(back.grid() == grid);
  for (std::size_t o = 0; o < v.size(); ++o) CHECK(back[o] == v[o]);

  std::stringstream truncated(ss.str().substr(0, ss.str().size() - 3));
  CHECK_THROWS_AS(read_dspec(truncated), FormatError);
  CHECK_THROWS_AS(DiscreteSpectrum(grid, std::vector<double>(3)), DomainError);
}
