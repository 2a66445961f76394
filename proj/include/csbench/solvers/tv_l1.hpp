#pragma once

#include <cmath>
#include <limits>

#include "csbench/solvers/config.hpp"
#include "csbench/solvers/total_variation.hpp"

namespace csbench {

/// TV-regularized least squares, min_x TV(x) + (lambda/2)||A x - y||^2, by
/// proximal gradient descent.
///
/// The objective is scaled by 1/lambda so the smooth part is 0.5||Ax - y||^2
/// with Lipschitz constant L = sigma_max(A)^2 (power iteration). Each step is
///   x+ = prox_{TV / (lambda L)}(x - A^T(Ax - y) / L)
/// with the TV prox from a warm-started dual iteration. A candidate that would
/// raise the objective is recomputed with four times as many inner steps
/// (up to three times) before the solver gives up and keeps the current iterate.
///
/// specifics: lambda (100), inner_iterations (10), power_iterations (20).
inline ChannelSolution tv_l1_reconstruct(const Vector& y, const SensingMatrix& a, Shape shape,
                                         const SolverConfig& cfg) {
  cfg.validate();
  detail::check_dimensions(y, a, shape);
  const double lambda = cfg.specifics.get_double("lambda", 100.0);
  const int inner = static_cast<int>(cfg.specifics.get_int("inner_iterations", 10));
  const int power = static_cast<int>(cfg.specifics.get_int("power_iterations", 20));
  if (!(lambda > 0)) throw ConfigError("lambda must be > 0");

  const auto& e = a.entries();
  const double lip = a.lipschitz_estimate(power);
  ChannelSolution sol;
  sol.x = Vector::Zero(static_cast<Eigen::Index>(a.n()));
  if (lip == 0.0 || y.norm() == 0.0) {
    sol.final_residual = relative_residual(a, sol.x, y);
    return sol;
  }

  auto objective = [&](const Vector& x, const Vector& r) {
    return tv::anisotropic(x, shape) + 0.5 * lambda * r.squaredNorm();
  };

  tv::Prox prox(shape);
  Vector r = e * sol.x - y;
  double current = objective(sol.x, r);
  sol.diagnostics.objective.push_back(current);
  sol.diagnostics.residual.push_back(r.norm() / y.norm());

  const double t = 1.0 / (lambda * lip);
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    const Vector v = sol.x - (e.transpose() * r) / lip;
    Vector cand = prox(v, t, inner);
    Vector cand_r = e * cand - y;
    double cand_obj = objective(cand, cand_r);
    int effort = inner;
    for (int retry = 0; retry < 3 && cand_obj > current; ++retry) {
      effort *= 4;
      cand = prox(v, t, effort);
      cand_r = e * cand - y;
      cand_obj = objective(cand, cand_r);
    }
    sol.iterations = it;
    if (!std::isfinite(cand_obj)) throw DivergenceError("tv_l1 objective is not finite", static_cast<std::size_t>(it));
    if (cand_obj > current) break;

    const double change = relative_change(cand, sol.x);
    sol.x = std::move(cand);
    r = std::move(cand_r);
    current = cand_obj;
    sol.diagnostics.objective.push_back(current);
    sol.diagnostics.residual.push_back(r.norm() / y.norm());
    if (change < cfg.tolerance) break;
  }
  sol.final_residual = r.norm() / y.norm();
  return sol;
}

}  // namespace csbench
