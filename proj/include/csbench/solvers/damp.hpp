#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "csbench/random.hpp"
#include "csbench/solvers/config.hpp"
#include "csbench/solvers/denoisers.hpp"

namespace csbench {

/// Denoising-based approximate message passing.
///
///   sigma_t = ||z_t|| / sqrt(m)
///   v       = x_t + A^T z_t
///   x_{t+1} = D_{sigma_t}(v)
///   z_{t+1} = y - A x_{t+1} + z_t * div D / m        (Onsager term)
///
/// starting from x_0 = 0, z_0 = y. The divergence comes from one Monte-Carlo
/// probe, eta^T (D(v + eps eta) - D(v)) / eps with Rademacher eta and
/// eps = min(sigma_t, max|v|) / 1000. Tying eps to sigma_t keeps the probe
/// inside the denoiser's linear regions once the noise level falls below
/// max|v| / 1000. The returned iterate is the one with the smallest
/// measurement residual.
///
/// specifics: denoiser (soft_threshold), probe_seed (1), plus DenoiserParams.
inline ChannelSolution damp_reconstruct(const Vector& y, const SensingMatrix& a, Shape shape,
                                        const SolverConfig& cfg) {
  cfg.validate();
  detail::check_dimensions(y, a, shape);
  const std::string name = cfg.specifics.get_string("denoiser", "soft_threshold");
  if (!is_denoiser(name)) throw ConfigError("unknown denoiser '" + name + "'");
  const DenoiserParams params = DenoiserParams::from(cfg.specifics);
  NormalStream probe(static_cast<std::uint64_t>(cfg.specifics.get_int("probe_seed", 1)));

  const auto& e = a.entries();
  const auto m = static_cast<double>(a.m());
  const double ny = y.norm();

  ChannelSolution sol;
  Vector x = Vector::Zero(static_cast<Eigen::Index>(a.n()));
  Vector z = y;
  sol.x = x;
  double best = ny;
  sol.final_residual = ny > 0 ? 1.0 : 0.0;
  if (ny == 0.0) return sol;

  Vector eta(x.size());
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    const double sigma = z.norm() / std::sqrt(m);
    if (!std::isfinite(sigma)) throw DivergenceError("D-AMP noise estimate is not finite", static_cast<std::size_t>(it));
    sol.diagnostics.sigma.push_back(sigma);

    const Vector v = x + e.transpose() * z;
    const Vector next = denoise(name, v, sigma, shape, params);

    for (auto& s : eta) s = probe.sign();
    const double eps = std::min(sigma, v.cwiseAbs().maxCoeff()) / 1000.0 + 1e-15;
    const Vector bumped = denoise(name, v + eps * eta, sigma, shape, params);
    const double divergence = eta.dot(bumped - next) / eps;

    const double change = relative_change(next, x);
    z = y - e * next + z * (divergence / m);
    x = next;
    sol.iterations = it;

    const double residual = (e * x - y).norm();
    if (!std::isfinite(residual)) throw DivergenceError("D-AMP iterate is not finite", static_cast<std::size_t>(it));
    sol.diagnostics.residual.push_back(residual / ny);
    if (residual <= best) {
      best = residual;
      sol.x = x;
    }
    if (change < cfg.tolerance) break;
  }
  sol.final_residual = best / ny;
  return sol;
}

}  // namespace csbench
