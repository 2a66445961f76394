#pragma once

#include <algorithm>
#include <cmath>

#include "csbench/solvers/config.hpp"
#include "csbench/solvers/pinv.hpp"
#include "csbench/solvers/total_variation.hpp"

namespace csbench {

namespace detail {

inline Vector shrink(const Vector& v, double threshold) {
  return v.unaryExpr([threshold](double e) {
    const double mag = std::abs(e) - threshold;
    return mag > 0 ? std::copysign(mag, e) : 0.0;
  });
}

}  // namespace detail

/// Equality-constrained TV recovery, min TV(x) s.t. A x = y, by augmented
/// Lagrangian alternating minimization with gradient splitting w ~ D x:
///
///   L = |w|_1 - nu^T (Dx - w) + beta/2 |Dx - w|^2 - lam^T (Ax - y) + mu/2 |Ax - y|^2
///
/// Each iteration shrinks w in closed form, updates x with a few warm-started
/// conjugate-gradient steps on (beta D^T D + mu A^T A) x = D^T(beta w + nu) + A^T(mu y + lam),
/// then ascends both multipliers. beta doubles from beta0 to beta_max whenever
/// the iterate settles (relative change below inner_tolerance) or after
/// inner_iterations steps at the current level. The run stops once beta is at
/// its maximum and the relative change drops below cfg.tolerance. The final
/// iterate is projected onto {x : A x = y} with the least-norm correction.
///
/// specifics: beta0 (32), beta_max (32768), mu (256), cg_iterations (8),
/// inner_iterations (30), inner_tolerance (1e-3).
inline ChannelSolution tval3_reconstruct(const Vector& y, const SensingMatrix& a, Shape shape,
                                         const SolverConfig& cfg) {
  cfg.validate();
  detail::check_dimensions(y, a, shape);
  double beta = cfg.specifics.get_double("beta0", 32.0);
  const double beta_max = cfg.specifics.get_double("beta_max", 32768.0);
  const double mu = cfg.specifics.get_double("mu", 256.0);
  const int cg_steps = static_cast<int>(cfg.specifics.get_int("cg_iterations", 8));
  const int level_cap = static_cast<int>(cfg.specifics.get_int("inner_iterations", 30));
  const double level_tol = cfg.specifics.get_double("inner_tolerance", 1e-3);
  if (!(beta > 0) || !(beta_max >= beta) || !(mu > 0)) throw ConfigError("tval3 penalties must be positive");

  const auto& e = a.entries();
  const auto n = static_cast<Eigen::Index>(a.n());
  ChannelSolution sol;
  sol.x = Vector::Zero(n);
  const double ny = y.norm();
  if (ny == 0.0) return sol;

  Vector nu_h = Vector::Zero(n), nu_v = Vector::Zero(n);
  Vector lam = Vector::Zero(y.size());
  // Minimum-norm start, A^T y for orthonormal rows.
  sol.x = e.transpose() * y;
  tv::Gradient dx = tv::gradient(sol.x, shape);
  Vector w_h, w_v;

  auto normal_op = [&](const Vector& p, double b) -> Vector {
    const tv::Gradient g = tv::gradient(p, shape);
    return b * tv::gradient_adjoint(g.horizontal, g.vertical, shape) + mu * (e.transpose() * (e * p));
  };

  int at_level = 0;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    w_h = detail::shrink(dx.horizontal - nu_h / beta, 1.0 / beta);
    w_v = detail::shrink(dx.vertical - nu_v / beta, 1.0 / beta);

    const Vector rhs = tv::gradient_adjoint(beta * w_h + nu_h, beta * w_v + nu_v, shape) +
                       e.transpose() * (mu * y + lam);
    Vector x = sol.x;
    Vector res = rhs - normal_op(x, beta);
    Vector dir = res;
    double rr = res.squaredNorm();
    const double rhs_norm2 = rhs.squaredNorm();
    for (int k = 0; k < cg_steps && rr > 1e-30 * rhs_norm2; ++k) {
      const Vector q = normal_op(dir, beta);
      const double alpha = rr / dir.dot(q);
      x += alpha * dir;
      res -= alpha * q;
      const double rr_next = res.squaredNorm();
      dir = res + (rr_next / rr) * dir;
      rr = rr_next;
    }

    dx = tv::gradient(x, shape);
    const Vector ax = e * x;
    nu_h -= beta * (dx.horizontal - w_h);
    nu_v -= beta * (dx.vertical - w_v);
    lam -= mu * (ax - y);

    if (!x.allFinite()) throw DivergenceError("tval3 iterate is not finite", static_cast<std::size_t>(it));
    const double change = relative_change(x, sol.x);
    sol.x = std::move(x);
    sol.iterations = it;

    const double dx_norm = std::sqrt(dx.horizontal.squaredNorm() + dx.vertical.squaredNorm());
    const double split = std::sqrt((w_h - dx.horizontal).squaredNorm() + (w_v - dx.vertical).squaredNorm());
    sol.diagnostics.residual.push_back((ax - y).norm() / ny);
    sol.diagnostics.primal_residual.push_back(dx_norm > 0 ? split / dx_norm : split);
    sol.diagnostics.objective.push_back(tv::anisotropic(sol.x, shape));

    ++at_level;
    if (beta >= beta_max) {
      if (change < cfg.tolerance) break;
    } else if (change < level_tol || at_level >= level_cap) {
      beta = std::min(2.0 * beta, beta_max);
      at_level = 0;
    }
  }
  sol.x += LeastNormSolver(a).solve(y - e * sol.x);
  sol.final_residual = relative_residual(a, sol.x, y);
  return sol;
}

}  // namespace csbench
