#include "ratcov/joint_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "coords.hpp"
#include "newton.hpp"
#include "ratcov/error.hpp"
#include "ratcov/grid_transform.hpp"

namespace ratcov {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double joint_sum(std::span<const double> p, std::span<const double> q, double lambda) {
  double pmax = 0.0;
  double qmax = 0.0;
  for (double v : p) pmax = std::max(pmax, std::abs(v));
  for (double v : q) qmax = std::max(qmax, std::abs(v));
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < -1e-13 * pmax || q[i] < -1e-13 * qmax) return kInf;
    if (p[i] > 0.0) {
      if (!(q[i] > 0.0)) return kInf;
      acc += p[i] * std::log(p[i] / q[i]);
      if (lambda > 0.0) acc -= lambda * std::log(p[i]);
    } else if (lambda > 0.0) {
      return kInf;
    }
  }
  return acc / static_cast<double>(p.size());
}

void check_normalization(const HermitianSeq& p, const HermitianSeq& gamma) {
  if (std::abs(p.zero() - 1.0) > 1e-12) throw DomainError("joint problem requires p_0 = 1");
  if (std::abs(gamma.zero() - 1.0) > 1e-12) throw DomainError("joint problem requires gamma_0 = 1");
}

struct Joint {
  detail::Coords cp;  // p without its zero element
  detail::Coords cq;
  Eigen::VectorXd cvec;
  Eigen::VectorXd gvec;
  double lambda;

  Eigen::Index np() const { return static_cast<Eigen::Index>(cp.size()); }
  Eigen::Index nq() const { return static_cast<Eigen::Index>(cq.size()); }

  std::vector<double> pvals(const Eigen::VectorXd& x) const { return cp.evaluate(x.head(np()), 1.0); }
  std::vector<double> qvals(const Eigen::VectorXd& x) const { return cq.evaluate(x.tail(nq())); }

  double value(const Eigen::VectorXd& x) const {
    const double linear = cvec.dot(x.tail(nq())) - gvec.dot(x.head(np())) - 1.0;
    const double s = joint_sum(pvals(x), qvals(x), lambda);
    return std::isfinite(s) ? linear + s : kInf;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const {
    const auto p = pvals(x);
    const auto q = qvals(x);
    std::vector<double> rp(p.size()), rq(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      rq[i] = p[i] / q[i];
      rp[i] = std::log(p[i] / q[i]) - lambda / p[i];
    }
    Eigen::VectorXd g(np() + nq());
    g.head(np()) = cp.project_values(rp) - gvec;
    g.tail(nq()) = cvec - cq.project_values(rq);
    return g;
  }

  struct Weights {
    std::vector<double> spp, sqq, spq;
  };
  Weights weights(const Eigen::VectorXd& x) const {
    const auto p = pvals(x);
    const auto q = qvals(x);
    Weights w{std::vector<double>(p.size()), std::vector<double>(p.size()), std::vector<double>(p.size())};
    for (std::size_t i = 0; i < p.size(); ++i) {
      w.spp[i] = 1.0 / p[i] + lambda / (p[i] * p[i]);
      w.sqq[i] = p[i] / (q[i] * q[i]);
      w.spq[i] = -1.0 / q[i];
    }
    return w;
  }

  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const {
    const auto w = weights(x);
    const Grid& grid = cq.grid();
    Eigen::MatrixXd h(np() + nq(), np() + nq());
    h.topLeftCorner(np(), np()) = cp.gram(full_moments(w.spp, grid));
    h.bottomRightCorner(nq(), nq()) = cq.gram(full_moments(w.sqq, grid));
    const Eigen::MatrixXd cross = cp.gram(full_moments(w.spq, grid), cq);
    h.topRightCorner(np(), nq()) = cross;
    h.bottomLeftCorner(nq(), np()) = cross.transpose();
    return h;
  }

  Eigen::VectorXd direction(const Eigen::VectorXd& x, const Eigen::VectorXd& g) const {
    if (np() + nq() <= detail::kDenseLimit) return detail::newton_direction(hessian(x), g);
    const auto w = weights(x);
    const Grid& grid = cq.grid();
    Eigen::VectorXd diag(np() + nq());
    diag.head(np()) = cp.gram_diagonal(full_moments(w.spp, grid));
    diag.tail(nq()) = cq.gram_diagonal(full_moments(w.sqq, grid));
    auto hv = [&](const Eigen::VectorXd& v) {
      const auto dp = cp.evaluate(v.head(np()));
      const auto dq = cq.evaluate(v.tail(nq()));
      std::vector<double> up(dp.size()), uq(dp.size());
      for (std::size_t i = 0; i < dp.size(); ++i) {
        up[i] = w.spp[i] * dp[i] + w.spq[i] * dq[i];
        uq[i] = w.spq[i] * dp[i] + w.sqq[i] * dq[i];
      }
      Eigen::VectorXd out(v.size());
      out.head(np()) = cp.project_values(up);
      out.tail(nq()) = cq.project_values(uq);
      return out;
    };
    return detail::cg_direction(hv, diag, g);
  }
};

double min_ratio(std::span<const double> v) {
  double lo = v[0];
  double hi = 0.0;
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, std::abs(x));
  }
  return hi > 0.0 ? lo / hi : 0.0;
}

}  // namespace

double joint_objective(const HermitianSeq& p, const HermitianSeq& q, const HermitianSeq& c,
                       const HermitianSeq& gamma, double lambda, const Grid& grid) {
  check_normalization(p, gamma);
  if (lambda < 0.0) throw DomainError("lambda must be nonnegative");
  const double s = joint_sum(detail::evaluate(p, grid), detail::evaluate(q, grid), lambda);
  return inner_product(c, q) - inner_product(gamma, p) + s;
}

JointGradient joint_gradient(const HermitianSeq& p, const HermitianSeq& q, const HermitianSeq& c,
                             const HermitianSeq& gamma, double lambda, const Grid& grid) {
  check_normalization(p, gamma);
  const auto pv = detail::evaluate(p, grid);
  const auto qv = detail::evaluate(q, grid);
  std::vector<double> rp(pv.size()), rq(pv.size());
  for (std::size_t i = 0; i < pv.size(); ++i) {
    if (!(pv[i] > 0.0) || !(qv[i] > 0.0)) throw DomainError("joint gradient needs an interior point");
    rq[i] = pv[i] / qv[i];
    rp[i] = std::log(pv[i] / qv[i]) - lambda / pv[i];
  }
  const IndexSet& set = c.index_set();
  HermitianSeq gp = detail::moments(rp, grid, set) - gamma;
  gp = gp - HermitianSeq::delta(set, gp.zero());
  return {std::move(gp), c - detail::moments(rq, grid, set)};
}

Eigen::MatrixXd joint_hessian(const HermitianSeq& p, const HermitianSeq& q, double lambda, const Grid& grid) {
  const IndexSet& set = q.index_set();
  const detail::Coords cp(set, grid, false, false);
  const detail::Coords cq(set, grid, false, true);
  const Joint joint{cp, cq, Eigen::VectorXd::Zero(cq.size()), Eigen::VectorXd::Zero(cp.size()), lambda};
  Eigen::VectorXd x(cp.size() + cq.size());
  x.head(cp.size()) = cp.coordinates(p);
  x.tail(cq.size()) = cq.coordinates(q);
  for (double v : joint.pvals(x)) {
    if (!(v > 0.0)) throw DomainError("joint Hessian needs P > 0 on the grid");
  }
  for (double v : joint.qvals(x)) {
    if (!(v > 0.0)) throw DomainError("joint Hessian needs Q > 0 on the grid");
  }
  return joint.hessian(x);
}

JointResult solve_joint(const HermitianSeq& c, const HermitianSeq& gamma, double lambda, const Grid& grid,
                        const SolverOptions& opts) {
  opts.validate();
  if (lambda < 0.0) throw DomainError("lambda must be nonnegative");
  const IndexSet& set = c.index_set();
  if (!(gamma.index_set() == set)) throw DomainError("c and gamma live on different index sets");
  if (std::abs(gamma.zero() - 1.0) > 1e-12) throw DomainError("joint problem requires gamma_0 = 1");
  if (set.dim() != grid.dim()) throw DomainError("dimension mismatch");
  if (!grid.resolves(set.degree())) throw AliasingError("grid does not resolve the index set (need 2 n_j < N_j)");
  if (opts.cone_check && !sampled_dual_cone_check(c, grid)) {
    throw ConeError("covariance data failed the sampled dual-cone test on this grid");
  }
  const bool even = detail::flip_closed(set) && detail::even_symmetric(c) && detail::even_symmetric(gamma);
  detail::Coords cp(set, grid, even, false);
  detail::Coords cq(set, grid, even, true);
  Eigen::VectorXd cvec = cq.project(c);
  Eigen::VectorXd gvec = cp.project(gamma);
  Joint joint{std::move(cp), std::move(cq), std::move(cvec), std::move(gvec), lambda};

  Eigen::VectorXd x = Eigen::VectorXd::Zero(joint.np() + joint.nq());
  x.tail(joint.nq()) = joint.cq.coordinates(HermitianSeq::delta(set, 1.0 / c.zero()));
  const double gtol = opts.grad_tol * std::max(c.max_abs(), gamma.max_abs());

  detail::NewtonProblem prob;
  prob.value = [&](const Eigen::VectorXd& v) { return joint.value(v); };
  prob.gradient = [&](const Eigen::VectorXd& v) { return joint.gradient(v); };
  prob.direction = [&](const Eigen::VectorXd& v, const Eigen::VectorXd& g) { return joint.direction(v, g); };
  int iterations = 0;
  if (lambda == 0.0) {
    // Without regularization the functional is finite on the boundary and
    // Newton can wedge itself against it; follow the regularized path in.
    for (double lam = kDefaultLambda; lam >= 0.99e-8; lam *= 0.1) {
      joint.lambda = lam;
      const auto o = detail::newton_minimize(prob, x, gtol, opts);
      iterations += o.iterations;
      x = o.x;
    }
    joint.lambda = 0.0;
  }
  auto o = detail::newton_minimize(prob, x, gtol, opts);
  o.iterations += iterations;
  x = o.x;

  JointResult r{.p_hat = joint.cp.expand(x.head(joint.np()), 1.0),
                .q_hat = joint.cq.expand(x.tail(joint.nq())),
                .lambda = lambda,
                .ceps_residual = HermitianSeq(set),
                .iterations = o.iterations,
                .objective = o.value,
                .grad_norm = o.grad.lpNorm<Eigen::Infinity>()};
  const auto pv = joint.pvals(x);
  const auto qv = joint.qvals(x);
  const double pr = min_ratio(pv);
  const double qr = min_ratio(qv);
  r.interior = pr >= opts.boundary_tol && qr >= opts.boundary_tol;
  r.converged = o.converged || (o.stalled && r.grad_norm <= 1e4 * gtol);
  if (!r.converged) {
    // lambda = 0 may legitimately drift to the boundary without a minimizer inside
    const bool drifting = lambda == 0.0 && std::min(pr, qr) < 1e-4;
    if (o.halted || drifting) {
      r.interior = false;
    } else {
      throw ConvergenceError("joint Newton stopped after " + std::to_string(o.iterations) +
                             " iterations with gradient norm " + sci(r.grad_norm));
    }
  }
  std::vector<double> ratio(pv.size()), logs(pv.size());
  for (std::size_t i = 0; i < pv.size(); ++i) {
    const bool ok = pv[i] > 0.0 && qv[i] > 0.0;
    ratio[i] = ok ? pv[i] / qv[i] : 0.0;
    logs[i] = ok ? std::log(pv[i] / qv[i]) : 0.0;
  }
  r.cov_residual = (c - detail::moments(ratio, grid, set)).max_abs();
  HermitianSeq eps = detail::moments(logs, grid, set) - gamma;
  r.ceps_residual = eps - HermitianSeq::delta(set, eps.zero());
  return r;
}

SolverResult me_solve(const HermitianSeq& c, const Grid& grid, const SolverOptions& opts) {
  return solve(TrigPoly(HermitianSeq::delta(c.index_set())), c, grid, opts);
}

std::vector<int> me_degree(std::span<const int> n) {
  std::vector<int> out(n.size());
  for (std::size_t j = 0; j < n.size(); ++j) {
    if (n[j] < 0) throw DomainError("negative degree entry");
    out[j] = static_cast<int>(std::ceil(std::sqrt(2.0) * n[j]));
  }
  return out;
}

}  // namespace ratcov
