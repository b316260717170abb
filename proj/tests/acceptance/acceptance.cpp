// End-to-end acceptance checks, one PASS/FAIL line per criterion.
//
// Usage: acceptance [--only N] [--expect-fail N]...
// Exit status is 1 if a criterion fails that was not listed with
// --expect-fail. Listed failures are still printed as FAIL.
#include <Eigen/Dense>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <set>
#include <string>

#include "ratcov/compression.hpp"
#include "ratcov/dual_solver.hpp"
#include "ratcov/fixtures.hpp"
#include "ratcov/joint_solver.hpp"
#include "support.hpp"

using namespace ratcov;
using namespace testing;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

HermitianSeq ratio_moments(const TrigPoly& p, const HermitianSeq& q, const Grid& grid, const IndexSet& set) {
  const auto pv = eval_on_grid(p, grid);
  const auto qv = eval_on_grid(TrigPoly(q), grid);
  std::vector<double> r(grid.total());
  for (std::size_t o = 0; o < r.size(); ++o) r[o] = pv[o] / qv[o];
  return moments_on_grid(DiscreteSpectrum(grid, r), set);
}

Outcome moment_fixture() {
  const auto c = moments_on_grid(fixtures::reciprocal_cos_spectrum(Grid({64, 64})), make_box_index_set({1, 1}));
  const double e0 = std::abs(c[{0, 0}].real() - 1.0 / std::sqrt(3.0));
  const double e1 = std::abs(c[{0, 1}].real() - (-1.0 + 2.0 / std::sqrt(3.0)));
  return {e0 <= 1e-8 && e1 <= 1e-8, "c00 err " + fmt("%.2e", e0) + ", c01 err " + fmt("%.2e", e1)};
}

Outcome interior_recovery() {
  const auto set = make_box_index_set({2, 2});
  const Grid grid({32, 32});
  double worst_q = 0.0, worst_res = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const TrigPoly p(random_positive(set));
    const auto q = random_positive(set);
    const auto c = ratio_moments(p, q, grid, set);
    const auto r = solve(p, c, grid);
    worst_q = std::max(worst_q, (r.q_hat - q).max_abs() / q.max_abs());
    worst_res = std::max(worst_res, r.c_residual.max_abs() / c.max_abs());
  }
  return {worst_q <= 1e-6 && worst_res <= 1e-8,
          "max rel q err " + fmt("%.2e", worst_q) + ", max rel residual " + fmt("%.2e", worst_res)};
}

Outcome boundary_mass() {
  const auto set = make_box_index_set({1});
  const Grid grid({256});
  const TrigPoly p(HermitianSeq(set, 2.0, {Complex(1.0, 0.0)}));
  const auto r = solve(p, HermitianSeq(set, 1.0, {Complex(-0.5, 0.0)}), grid);
  const auto pv = eval_on_grid(p, grid);
  const auto qv = eval_on_grid(TrigPoly(r.q_hat), grid);
  double cont = 0.0;
  for (std::size_t o = 0; o < grid.total(); ++o) {
    if (o != 128) cont = std::max(cont, std::abs(pv[o] / qv[o] - 0.5));
  }
  if (r.masses.size() != 1) return {false, std::to_string(r.masses.size()) + " masses"};
  const auto w = continuum_masses(p, r, grid);
  const bool at_pi = r.masses[0].point == std::vector<int>{128};
  const double err = std::abs(w[0] - 0.5);
  return {cont <= 1e-3 && at_pi && err <= 1e-3,
          "continuous part err " + fmt("%.2e", cont) + ", mass " + fmt("%.6f", w[0]) + " at l=" +
              std::to_string(r.masses[0].point[0]) + " (raw grid weight " + fmt("%.6f", r.masses[0].weight) + ")"};
}

Outcome convergence() {
  std::string detail;
  bool ok = true;
  for (const auto& f : {fixtures::ar1_fixture(), fixtures::ar2d_fixture()}) {
    auto grids = f.grids;
    grids.push_back(f.reference);
    const auto rows = convergence_study(f.prior, f.c, grids);
    detail += std::to_string(f.reference.dim()) + "D:";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      detail += fmt(" %.1e", rows[i].distance);
      if (i > 0 && !(rows[i].distance < rows[i - 1].distance)) ok = false;
    }
    detail += "  ";
  }
  return {ok, detail};
}

Outcome identification() {
  const Grid grid({30, 30});
  const auto truth = fixtures::filter_spectrum(grid);
  const auto set = make_box_index_set({2, 2});
  const auto c = moments_on_grid(truth, set);
  auto gamma = log_moments_on_grid(truth, set);
  gamma = gamma - HermitianSeq::delta(set, gamma.zero() - 1.0);
  const auto r = solve_joint(c, gamma, 0.0, grid);
  const auto pv = eval_on_grid(TrigPoly(r.p_hat), grid);
  const auto qv = eval_on_grid(TrigPoly(r.q_hat), grid);
  double err = 0.0;
  for (std::size_t o = 0; o < grid.total(); ++o) err = std::max(err, std::abs(pv[o] / qv[o] - truth[o]) / truth[o]);
  return {err <= 1e-3 && r.interior, "max relative spectrum error " + fmt("%.2e", err)};
}

Outcome cepstral_identity() {
  const auto set = make_box_index_set({1, 1});
  const Grid grid({16, 16});
  const double lambda = 1e-2;
  double worst_eps = 0.0, worst_res = 0.0;
  bool all_interior = true;
  for (int trial = 0; trial < 10; ++trial) {
    auto p = random_positive(set, 0.5);
    p *= 1.0 / p.zero();
    const auto q = random_positive(set, 0.5);
    const auto pv = eval_on_grid(TrigPoly(p), grid);
    const auto qv = eval_on_grid(TrigPoly(q), grid);
    std::vector<double> s(grid.total());
    for (std::size_t o = 0; o < s.size(); ++o) s[o] = pv[o] / qv[o];
    const DiscreteSpectrum spec(grid, s);
    const auto c = moments_on_grid(spec, set);
    auto gamma = log_moments_on_grid(spec, set);
    gamma = gamma - HermitianSeq::delta(set, gamma.zero() - 1.0);
    const auto r = solve_joint(c, gamma, lambda, grid);
    all_interior = all_interior && r.interior && r.converged;
    const auto ph = eval_on_grid(TrigPoly(r.p_hat), grid);
    std::vector<double> inv(grid.total());
    for (std::size_t o = 0; o < inv.size(); ++o) inv[o] = 1.0 / ph[o];
    const auto m = moments_on_grid(DiscreteSpectrum(grid, inv), set);
    for (const auto& k : set.half()) worst_eps = std::max(worst_eps, std::abs(r.ceps_residual[k] - lambda * m[k]));
    worst_res = std::max(worst_res, r.cov_residual / c.max_abs());
  }
  return {all_interior && worst_eps <= 1e-6 && worst_res <= 1e-8,
          "max identity err " + fmt("%.2e", worst_eps) + ", max rel cov residual " + fmt("%.2e", worst_res)};
}

Outcome table_one() {
  const auto img = shepp_logan(256);
  const int n30[2] = {30, 30};
  const int n45[2] = {45, 45};
  const double ceps = mssim(img, decompress(compress(img, n30, 1e-2, CodecMode::cepstral)));
  const double me = mssim(img, decompress(compress(img, n45, 0.0, CodecMode::me)));
  const bool ok = std::abs(ceps - 0.8690) <= 0.05 && std::abs(me - 0.7044) <= 0.05;
  return {ok, "cepstral n=30 MSSIM " + fmt("%.4f", ceps) + " (target 0.8690), ME n=45 MSSIM " + fmt("%.4f", me) +
                  " (target 0.7044), tolerance 0.05"};
}

HermitianSeq bump(const HermitianSeq& s, std::size_t i, double h) {
  auto v = to_real_vector(s);
  v[i] += h;
  return from_real_vector(s.index_set(), v);
}

// Relative sup-norm distance between a real-coordinate gradient and central
// differences of f; the Wirtinger form doubles every non-zero coordinate.
double fd_error(const std::function<double(const HermitianSeq&)>& f, const HermitianSeq& x, const HermitianSeq& g,
                std::size_t first) {
  const auto gv = to_real_vector(g);
  double scale = 0.0, err = 0.0;
  for (std::size_t i = first; i < gv.size(); ++i) {
    const double want = i == 0 ? gv[i] : 2 * gv[i];
    const double h = 1e-6 * std::max(1.0, std::abs(to_real_vector(x)[i]));
    const double fd = (f(bump(x, i, h)) - f(bump(x, i, -h))) / (2 * h);
    scale = std::max(scale, std::abs(want));
    err = std::max(err, std::abs(fd - want));
  }
  return err / std::max(scale, 1e-300);
}

Outcome gradients() {
  const auto set = make_box_index_set({1, 1});
  const Grid grid({12, 12});
  double dual = 0.0, joint = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const TrigPoly p(random_positive(set));
    const auto c = ratio_moments(p, random_positive(set), grid, set);
    const auto q = random_positive(set);
    dual = std::max(dual, fd_error([&](const HermitianSeq& x) { return objective(p, c, x, grid); }, q,
                                   gradient(p, c, q, grid), 0));

    auto pp = random_positive(set, 0.5);
    pp *= 1.0 / pp.zero();
    auto gamma = random_seq(set, true);
    gamma = gamma - HermitianSeq::delta(set, gamma.zero() - 1.0);
    const double lambda = trial % 2 == 0 ? 0.0 : 0.01;
    const auto g = joint_gradient(pp, q, c, gamma, lambda, grid);
    joint = std::max(joint, fd_error([&](const HermitianSeq& x) { return joint_objective(pp, x, c, gamma, lambda, grid); },
                                     q, g.gq, 0));
    joint = std::max(joint, fd_error([&](const HermitianSeq& x) { return joint_objective(x, q, c, gamma, lambda, grid); },
                                     pp, g.gp, 1));
  }
  return {dual <= 1e-6 && joint <= 1e-6, "max rel err dual " + fmt("%.2e", dual) + ", joint " + fmt("%.2e", joint)};
}

Outcome properties() {
  std::string failed;
  // coefficient bounds
  for (int trial = 0; trial < 1000; ++trial) {
    const auto set = make_box_index_set({1 + trial % 3, trial % 2});
    const Grid grid({4 * (1 + trial % 3) + 4, 4 * (trial % 2) + 4});
    if (!coeff_bounds_check(TrigPoly(random_square(set)), grid)) {
      failed += " bounds";
      break;
    }
  }
  // coercivity along rays
  const auto set = make_box_index_set({1, 1});
  const Grid grid({10, 10});
  const TrigPoly p(random_positive(set));
  const auto c = ratio_moments(p, random_positive(set), grid, set);
  for (int trial = 0; trial < 50; ++trial) {
    const auto q = random_positive(set, 0.1);
    const double f100 = objective(p, c, 100.0 * q, grid);
    const double f1000 = objective(p, c, 1000.0 * q, grid);
    if (!(f1000 > f100 && f100 > objective(p, c, 10.0 * q, grid))) {
      failed += " coercivity";
      break;
    }
  }
  // scaling equivariance
  const auto base = solve(p, c, grid);
  for (double alpha : {0.5, 2.0, 10.0}) {
    if ((solve(p, alpha * c, grid).q_hat * alpha - base.q_hat).max_abs() > 1e-8 * base.q_hat.max_abs()) {
      failed += " scaling";
      break;
    }
  }
  // hessian spot checks
  for (int trial = 0; trial < 20; ++trial) {
    const auto h = hessian(p, random_positive(set), grid);
    if (Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues().minCoeff() < -1e-9 * h.norm()) {
      failed += " psd";
      break;
    }
  }
  // flat family P = Q = 1 - rho cos at the white instance
  const auto one = make_box_index_set({1});
  const auto d = HermitianSeq::delta(one);
  const double f0 = joint_objective(d, d, d, d, 0.0, Grid({64}));
  double spread = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double rho = -1.0 + 0.1 * i;
    const HermitianSeq pq(one, 1.0, {Complex(-rho / 2, 0.0)});
    spread = std::max(spread, std::abs(joint_objective(pq, pq, d, d, 0.0, Grid({64})) - f0));
  }
  if (spread > 1e-10) failed += " family";
  return {failed.empty(), failed.empty() ? "bounds, coercivity, scaling, psd, family spread " + fmt("%.1e", spread)
                                         : "failed:" + failed};
}

Outcome counterexample() {
  const auto set = make_box_index_set({1});
  const auto r = solve_joint(HermitianSeq(set, 2.0, {Complex(1.0, 0.0)}), HermitianSeq(set, 1.0, {Complex(-1.0, 0.0)}),
                             0.0, Grid({64}));
  return {!r.interior && r.cov_residual > 0.0,
          std::string("interior=") + (r.interior ? "true" : "false") + ", cov residual " + fmt("%.3f", r.cov_residual)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expected, only;
  for (int i = 1; i + 1 < argc; i += 2) {
    if (std::strcmp(argv[i], "--expect-fail") == 0) expected.insert(std::atoi(argv[i + 1]));
    else if (std::strcmp(argv[i], "--only") == 0) only.insert(std::atoi(argv[i + 1]));
    else {
      std::fprintf(stderr, "usage: %s [--only N] [--expect-fail N]...\n", argv[0]);
      return 2;
    }
  }
  rng(12345);

  struct Criterion {
    int id;
    const char* name;
    double budget;  // seconds
    Outcome (*run)();
  };
  const Criterion all[] = {
      {1, "grid moments of 1/(2-cos t2)", 1, moment_fixture},
      {2, "interior recovery, 20 random instances", 30, interior_recovery},
      {3, "boundary example with point mass", 5, boundary_mass},
      {4, "grid convergence, 1D and 2D", 120, convergence},
      {5, "2D filter identification", 60, identification},
      {6, "regularized cepstral identity, 10 instances", 60, cepstral_identity},
      {7, "Shepp-Logan MSSIM", 600, table_one},
      {8, "gradient finite differences", 30, gradients},
      {9, "property suites", 60, properties},
      {10, "boundary counterexample", 30, counterexample},
  };

  int unexpected = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = Clock::now();
    Outcome o{false, ""};
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool pass = o.pass && secs <= c.budget;
    std::printf("%s %2d %s: %s [%.2fs / %.0fs]%s\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                c.budget, !pass && expected.count(c.id) ? " (known failure)" : "");
    std::fflush(stdout);
    if (!pass && !expected.count(c.id)) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
