#include "ratcov/dual_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>

#include "coords.hpp"
#include "newton.hpp"
#include "nnls.hpp"
#include "ratcov/error.hpp"

namespace ratcov {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// P below this fraction of its maximum counts as an exact grid zero
constexpr double kClip = 1e-12;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Prior values on the grid with round-off zeros clipped.
std::vector<double> prior_on_grid(const TrigPoly& p, const Grid& grid) {
  auto w = detail::evaluate(p.coeffs(), grid);
  const double top = max_abs(w);
  if (!(top > 0.0)) throw DomainError("prior vanishes on the whole grid");
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] < -1e-9 * top) {
      throw DomainError("prior is negative at grid point offset " + std::to_string(i));
    }
    if (w[i] <= kClip * top) w[i] = 0.0;
  }
  return w;
}

// J on raw grid values; +inf outside the feasible set.
double dual_value(double linear, std::span<const double> w, std::span<const double> q) {
  const double top = max_abs(q);
  double acc = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (w[i] > 0.0) {
      if (!(q[i] > 0.0)) return kInf;
      acc += w[i] * std::log(q[i]);
    } else if (q[i] < -1e-13 * top) {
      return kInf;
    }
  }
  return linear - acc / static_cast<double>(q.size());
}

std::vector<double> ratio(std::span<const double> w, std::span<const double> q, int power) {
  std::vector<double> r(q.size(), 0.0);
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (w[i] > 0.0) r[i] = power == 1 ? w[i] / q[i] : w[i] / (q[i] * q[i]);
  }
  return r;
}

struct Dual {
  const detail::Coords& coords;
  Eigen::VectorXd cvec;

  double value(const Eigen::VectorXd& x, std::span<const double> w) const {
    const auto q = coords.evaluate(x);
    return dual_value(cvec.dot(x), w, q);
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x, std::span<const double> w) const {
    const auto q = coords.evaluate(x);
    return cvec - coords.project_values(ratio(w, q, 1));
  }
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x, std::span<const double> w) const {
    const auto q = coords.evaluate(x);
    const auto s = ratio(w, q, 2);
    return coords.gram(full_moments(s, coords.grid()));
  }
  Eigen::VectorXd direction(const Eigen::VectorXd& x, const Eigen::VectorXd& g, std::span<const double> w) const {
    if (static_cast<long>(coords.size()) <= detail::kDenseLimit) return detail::newton_direction(hessian(x, w), g);
    const auto q = coords.evaluate(x);
    const auto s = ratio(w, q, 2);
    const auto diag = coords.gram_diagonal(full_moments(s, coords.grid()));
    return detail::cg_direction([&](const Eigen::VectorXd& v) { return coords.apply(s, v); }, diag, g);
  }

  detail::NewtonOutcome minimize(const Eigen::VectorXd& x0, const std::vector<double>& w, double gtol,
                                 const SolverOptions& opts) const {
    detail::NewtonProblem prob;
    prob.value = [&](const Eigen::VectorXd& x) { return value(x, w); };
    prob.gradient = [&](const Eigen::VectorXd& x) { return gradient(x, w); };
    prob.direction = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& g) { return direction(x, g, w); };
    return detail::newton_minimize(prob, x0, gtol, opts);
  }
};

// Newton restricted to {x : Q(zeta_l) = 0 for l in zset}.
detail::NewtonOutcome constrained_minimize(const Dual& dual, const Eigen::VectorXd& x0, const std::vector<double>& w,
                                           const std::vector<std::size_t>& zset, double gtol,
                                           const SolverOptions& opts) {
  const auto& coords = dual.coords;
  Eigen::MatrixXd a(static_cast<Eigen::Index>(zset.size()), static_cast<Eigen::Index>(coords.size()));
  for (std::size_t r = 0; r < zset.size(); ++r) a.row(static_cast<Eigen::Index>(r)) = coords.point_row(zset[r]);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a.transpose());
  qr.setThreshold(1e-10);
  const Eigen::Index rank = qr.rank();
  const Eigen::MatrixXd qfull = qr.householderQ();
  const Eigen::MatrixXd basis = qfull.rightCols(qfull.cols() - rank);

  detail::NewtonProblem prob;
  prob.value = [&](const Eigen::VectorXd& y) { return dual.value(basis * y, w); };
  prob.gradient = [&](const Eigen::VectorXd& y) { return Eigen::VectorXd(basis.transpose() * dual.gradient(basis * y, w)); };
  prob.direction = [&](const Eigen::VectorXd& y, const Eigen::VectorXd& g) {
    const Eigen::MatrixXd h = basis.transpose() * dual.hessian(basis * y, w) * basis;
    return detail::newton_direction(h, g);
  };
  Eigen::VectorXd y0 = basis.transpose() * x0;
  auto out = detail::newton_minimize(prob, y0, gtol, opts);
  out.x = basis * out.x;
  return out;
}

}  // namespace

void SolverOptions::validate() const {
  if (!(grad_tol > 0.0) || max_iter <= 0 || !(boundary_tol > 0.0) || !(ls_c1 > 0.0) || !(ls_c1 < 1.0) ||
      !(ls_shrink > 0.0) || !(ls_shrink < 1.0)) {
    throw DomainError("invalid solver options");
  }
}

double objective(const TrigPoly& p, const HermitianSeq& c, const HermitianSeq& q, const Grid& grid) {
  if (!(c.index_set() == q.index_set())) throw DomainError("index-set mismatch between c and q");
  const auto w = prior_on_grid(p, grid);
  const auto qv = detail::evaluate(q, grid);
  const double top = max_abs(qv);
  for (std::size_t i = 0; i < qv.size(); ++i) {
    if (qv[i] < -1e-12 * top) throw DomainError("Q is negative at grid point offset " + std::to_string(i));
  }
  std::vector<double> clipped(qv.size());
  for (std::size_t i = 0; i < qv.size(); ++i) clipped[i] = std::max(qv[i], 0.0);
  return dual_value(inner_product(c, q), w, clipped);
}

HermitianSeq gradient(const TrigPoly& p, const HermitianSeq& c, const HermitianSeq& q, const Grid& grid) {
  const auto w = prior_on_grid(p, grid);
  const auto qv = detail::evaluate(q, grid);
  for (std::size_t i = 0; i < qv.size(); ++i) {
    if (w[i] > 0.0 && !(qv[i] > 0.0)) throw DomainError("Q vanishes where P is positive");
  }
  return c - detail::moments(ratio(w, qv, 1), grid, c.index_set());
}

Eigen::MatrixXd hessian(const TrigPoly& p, const HermitianSeq& q, const Grid& grid) {
  const auto w = prior_on_grid(p, grid);
  const auto qv = detail::evaluate(q, grid);
  for (std::size_t i = 0; i < qv.size(); ++i) {
    if (w[i] > 0.0 && !(qv[i] > 0.0)) throw DomainError("Q vanishes where P is positive");
  }
  detail::Coords coords(q.index_set(), grid, false, true);
  return coords.gram(full_moments(ratio(w, qv, 2), grid));
}

SolverResult solve(const TrigPoly& p, const HermitianSeq& c, const Grid& grid, const SolverOptions& opts) {
  opts.validate();
  const IndexSet& set = c.index_set();
  if (set.dim() != grid.dim() || p.dim() != grid.dim()) throw DomainError("dimension mismatch");
  if (!grid.resolves(set.degree())) throw AliasingError("grid does not resolve the index set (need 2 n_j < N_j)");
  if (opts.cone_check && !sampled_dual_cone_check(c, grid)) {
    throw ConeError("covariance data failed the sampled dual-cone test on this grid");
  }
  const auto w = prior_on_grid(p, grid);
  const bool even = detail::flip_closed(set) && detail::even_symmetric(c) && detail::flip_closed(p.index_set()) &&
                    detail::even_symmetric(p.coeffs());
  const detail::Coords coords(set, grid, even, true);
  const Dual dual{coords, coords.project(c)};
  const double cnorm = c.max_abs();
  const double gtol = opts.grad_tol * cnorm;
  const double wmean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());

  std::vector<std::size_t> z0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == 0.0) z0.push_back(i);
  }

  Eigen::VectorXd x = coords.coordinates(HermitianSeq::delta(set, wmean / c.zero()));
  int iterations = 0;
  auto finish_interior = [&](const detail::NewtonOutcome& o) {
    iterations += o.iterations;
    // a stalled line search this close to stationarity is round-off, not failure
    if (!o.converged && !(o.stalled && o.grad.lpNorm<Eigen::Infinity>() <= 1e4 * gtol)) {
      throw ConvergenceError("dual Newton stopped after " + std::to_string(iterations) +
                             " iterations with gradient norm " + sci(o.grad.lpNorm<Eigen::Infinity>()) +
                             "; c may lie outside the dual cone of this grid");
    }
    x = o.x;
  };

  std::vector<std::size_t> zset;
  if (z0.empty()) {
    finish_interior(dual.minimize(x, w, gtol, opts));
  } else {
    // Barrier path: pad the prior at its zeros and shrink the padding. Points
    // where Q keeps shrinking with the padding carry mass in the limit. The
    // stages only need to be approximate; round-off in Q near its zeros caps
    // how deep the path can usefully go.
    std::vector<double> ws = w;
    std::vector<double> q_prev;
    for (double s = wmean; s >= 0.99e-7 * wmean; s *= 0.1) {
      for (std::size_t i : z0) ws[i] = s;
      q_prev = coords.evaluate(x);
      const auto o = dual.minimize(x, ws, gtol, opts);
      iterations += o.iterations;
      x = o.x;
    }
    const auto qs = coords.evaluate(x);
    const double qtop = max_abs(qs);
    for (std::size_t i : z0) {
      if (qs[i] < opts.boundary_tol * qtop || qs[i] < 0.5 * q_prev[i]) zset.push_back(i);
    }
    if (zset.empty()) {
      finish_interior(dual.minimize(x, w, gtol, opts));
    } else {
      const std::size_t max_rounds = 2 * z0.size() + 5;
      for (std::size_t round = 0;; ++round) {
        if (round > max_rounds) throw ConvergenceError("active-set search on the prior zero set did not settle");
        auto o = constrained_minimize(dual, x, w, zset, gtol, opts);
        iterations += o.iterations;
        const double gn = o.grad.lpNorm<Eigen::Infinity>();
        if (o.converged || (o.stalled && gn <= 1e4 * gtol)) {
          x = o.x;
          // KKT multipliers of the pinned points must be nonnegative
          const Eigen::VectorXd g = dual.gradient(x, w);
          Eigen::MatrixXd a(static_cast<Eigen::Index>(zset.size()), static_cast<Eigen::Index>(coords.size()));
          for (std::size_t r = 0; r < zset.size(); ++r) a.row(static_cast<Eigen::Index>(r)) = coords.point_row(zset[r]);
          const Eigen::VectorXd mu = a.transpose().colPivHouseholderQr().solve(g);
          Eigen::Index worst = 0;
          if (zset.size() > 1 && mu.minCoeff(&worst) < -1e-8 * cnorm) {
            zset.erase(zset.begin() + worst);
            continue;
          }
          break;
        }
        if (!o.stalled) {
          throw ConvergenceError("constrained Newton hit the iteration limit with gradient norm " + sci(gn));
        }
        // blocked by another prior zero: pin the smallest one and retry
        const auto q = coords.evaluate(o.x);
        std::size_t best = w.size();
        for (std::size_t i : z0) {
          if (std::find(zset.begin(), zset.end(), i) != zset.end()) continue;
          if (best == w.size() || q[i] < q[best]) best = i;
        }
        if (best == w.size()) {
          throw ConvergenceError("constrained Newton stalled with gradient norm " + sci(gn));
        }
        x = o.x;
        zset.push_back(best);
      }
    }
  }

  SolverResult r{coords.expand(x), HermitianSeq(set), {}, iterations, 0.0, false, 0.0, 0.0, false};
  const auto q = coords.evaluate(x);
  r.objective = dual.value(x, w);
  r.grad_norm = dual.gradient(x, w).lpNorm<Eigen::Infinity>();
  r.c_residual = c - detail::moments(ratio(w, q, 1), grid, set);
  const double qtop = max_abs(q);
  const double qmin = *std::min_element(q.begin(), q.end());
  r.on_boundary = qmin < opts.boundary_tol * qtop;
  if (r.on_boundary) {
    r.masses = singular_masses(r.q_hat, r.c_residual, grid, opts, &r.mass_residual);
    r.masses_approximate = r.mass_residual > 1e-6 * cnorm;
  } else {
    r.mass_residual = r.c_residual.max_abs();
  }
  return r;
}

std::vector<Mass> singular_masses(const HermitianSeq& q_hat, const HermitianSeq& c_residual, const Grid& grid,
                                  const SolverOptions& opts, double* residual) {
  const IndexSet& set = c_residual.index_set();
  if (residual) *residual = 0.0;
  if (c_residual.max_abs() == 0.0) return {};
  const auto q = detail::evaluate(q_hat, grid);
  const double qtop = max_abs(q);
  std::vector<std::size_t> zset;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] < opts.boundary_tol * qtop) zset.push_back(i);
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(1 + 2 * set.half().size());
  const auto bvec = to_real_vector(c_residual);
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(bvec.data(), rows);
  if (zset.empty()) {
    if (residual) *residual = c_residual.max_abs();
    return {};
  }
  Eigen::MatrixXd a(rows, static_cast<Eigen::Index>(zset.size()));
  for (std::size_t col = 0; col < zset.size(); ++col) {
    const auto theta = grid.angles(zset[col]);
    a(0, static_cast<Eigen::Index>(col)) = 1.0;
    for (std::size_t h = 0; h < set.half().size(); ++h) {
      const auto& k = set.half()[h];
      double phase = 0.0;
      for (std::size_t j = 0; j < k.size(); ++j) phase += k[j] * theta[j];
      a(static_cast<Eigen::Index>(1 + 2 * h), static_cast<Eigen::Index>(col)) = std::cos(phase);
      a(static_cast<Eigen::Index>(2 + 2 * h), static_cast<Eigen::Index>(col)) = std::sin(phase);
    }
  }
  const Eigen::VectorXd wts = detail::nnls(a, b);
  const double total = wts.sum();
  std::vector<Mass> out;
  Eigen::VectorXd kept = Eigen::VectorXd::Zero(wts.size());
  for (Eigen::Index i = 0; i < wts.size(); ++i) {
    if (wts[i] > 1e-14 * total) {
      out.push_back({grid.point(zset[static_cast<std::size_t>(i)]), wts[i]});
      kept[i] = wts[i];
    }
  }
  if (residual) *residual = (a * kept - b).lpNorm<Eigen::Infinity>();
  return out;
}

std::vector<double> continuum_masses(const TrigPoly& p, const SolverResult& r, const Grid& grid, double h) {
  const TrigPoly q(r.q_hat);
  std::vector<double> out;
  out.reserve(r.masses.size());
  auto wrap = [](double t) {
    if (t > M_PI) t -= 2.0 * M_PI;
    if (t <= -M_PI) t += 2.0 * M_PI;
    return t;
  };
  for (const auto& m : r.masses) {
    const auto theta = grid.angles(grid.offset(m.point));
    double acc = 0.0;
    int count = 0;
    for (std::size_t j = 0; j < theta.size(); ++j) {
      for (double sgn : {-1.0, 1.0}) {
        auto t = theta;
        t[j] = wrap(t[j] + sgn * h);
        const double qv = eval_direct(q, t);
        if (qv > 0.0) {
          acc += eval_direct(p, t) / qv;
          ++count;
        }
      }
    }
    const double phi = count ? acc / count : 0.0;
    out.push_back(m.weight - phi / static_cast<double>(grid.total()));
  }
  return out;
}

std::vector<ConvergenceRow> convergence_study(const TrigPoly& p, const HermitianSeq& c,
                                              const std::vector<Grid>& grids, const SolverOptions& opts) {
  if (grids.size() < 2) throw DomainError("convergence study needs at least two grids");
  for (std::size_t i = 1; i < grids.size(); ++i) {
    if (grids[i].total() <= grids[i - 1].total()) throw DomainError("grid list must be increasing");
  }
  const Grid& fine = grids.back();
  const auto ref = eval_on_grid(TrigPoly(solve(p, c, fine, opts).q_hat), fine);
  std::vector<ConvergenceRow> rows;
  for (std::size_t i = 0; i + 1 < grids.size(); ++i) {
    const auto qn = eval_on_grid(TrigPoly(solve(p, c, grids[i], opts).q_hat), fine);
    double d = 0.0;
    for (std::size_t l = 0; l < fine.total(); ++l) d = std::max(d, std::abs(qn[l] - ref[l]));
    rows.push_back({grids[i].dims(), d});
  }
  return rows;
}

}  // namespace ratcov
