#include "newton.hpp"

#include <cmath>
#include <limits>

#include "ratcov/error.hpp"

namespace ratcov::detail {

NewtonOutcome newton_minimize(const NewtonProblem& prob, Eigen::VectorXd x, double gtol,
                              const SolverOptions& opts) {
  NewtonOutcome out;
  double f = prob.value(x);
  if (!std::isfinite(f)) throw DomainError("Newton start point is infeasible");
  int flat = 0;  // consecutive steps accepted only through the rounding slack
  for (int it = 0;; ++it) {
    out.iterations = it;
    Eigen::VectorXd g = prob.gradient(x);
    if (g.lpNorm<Eigen::Infinity>() <= gtol) {
      out.converged = true;
      out.grad = std::move(g);
      break;
    }
    if (it >= opts.max_iter) {
      out.grad = std::move(g);
      break;
    }
    Eigen::VectorXd d = prob.direction(x, g);
    double slope = g.dot(d);
    if (!(slope < 0.0) || !d.allFinite()) {
      d = -g;
      slope = -g.squaredNorm();
    }
    // rounding slack: near the optimum f changes below its own precision
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() * (std::abs(f) + 1.0);
    double t = 1.0;
    bool accepted = false;
    Eigen::VectorXd trial;
    double ft = 0.0;
    // Predicted decrease lost in the noise of f: judge the full step by the
    // gradient instead, which stays accurate much closer to the optimum.
    if (-slope < 1e4 * slack) {
      trial = x + d;
      ft = prob.value(trial);
      if (std::isfinite(ft) && prob.gradient(trial).lpNorm<Eigen::Infinity>() < 0.9 * g.lpNorm<Eigen::Infinity>()) {
        x = std::move(trial);
        f = ft;
        flat = 0;
        continue;
      }
    }
    // backtrack until the step no longer moves x at double precision
    const double floor = 1e-16 * (1.0 + x.lpNorm<Eigen::Infinity>()) / std::max(d.lpNorm<Eigen::Infinity>(), 1e-300);
    while (t > floor) {
      trial = x + t * d;
      ft = prob.value(trial);
      if (std::isfinite(ft) && ft <= f + opts.ls_c1 * t * slope + slack) {
        accepted = true;
        break;
      }
      t *= opts.ls_shrink;
    }
    flat = (accepted && f - ft <= slack) ? flat + 1 : 0;
    if (!accepted || flat >= 3) {
      out.stalled = true;
      out.grad = std::move(g);
      break;
    }
    x = std::move(trial);
    f = ft;
    if (prob.halt && prob.halt(x)) {
      out.iterations = it + 1;
      out.halted = true;
      out.grad = prob.gradient(x);
      break;
    }
  }
  out.x = std::move(x);
  out.value = f;
  return out;
}

Eigen::VectorXd newton_direction(const Eigen::MatrixXd& h, const Eigen::VectorXd& g) {
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() == Eigen::Success) {
    Eigen::VectorXd d = llt.solve(-g);
    if (d.allFinite()) return d;
  }
  const double scale = std::max(h.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  for (double shift = 1e-10 * scale; shift < 1e3 * scale; shift *= 10.0) {
    Eigen::MatrixXd hs = h;
    hs.diagonal().array() += shift;
    Eigen::LLT<Eigen::MatrixXd> l2(hs);
    if (l2.info() != Eigen::Success) continue;
    Eigen::VectorXd d = l2.solve(-g);
    if (d.allFinite()) return d;
  }
  return -g;
}

Eigen::VectorXd cg_direction(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& hv,
                             const Eigen::VectorXd& diag, const Eigen::VectorXd& g, double rtol,
                             int max_iter) {
  const Eigen::VectorXd minv = diag.cwiseMax(1e-300).cwiseInverse();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(g.size());
  Eigen::VectorXd r = -g;
  Eigen::VectorXd z = minv.cwiseProduct(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  const double stop = rtol * g.norm();
  for (int it = 0; it < max_iter && r.norm() > stop; ++it) {
    const Eigen::VectorXd hp = hv(p);
    const double php = p.dot(hp);
    if (!(php > 0.0)) break;  // lost positive curvature; keep what we have
    const double alpha = rz / php;
    x += alpha * p;
    r -= alpha * hp;
    z = minv.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  return x.isZero() ? Eigen::VectorXd(-g) : x;
}

}  // namespace ratcov::detail
