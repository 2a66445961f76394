#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "csbench/error.hpp"
#include "csbench/image.hpp"
#include "csbench/sensing.hpp"
#include "csbench/solvers/config.hpp"
#include "csbench/solvers/damp.hpp"
#include "csbench/solvers/pinv.hpp"
#include "csbench/solvers/registry.hpp"
#include "csbench/solvers/tv_l1.hpp"
#include "csbench/solvers/tval3.hpp"

namespace csbench {

/// Name of the least-norm baseline accepted by `reconstruct` next to the registry methods.
inline constexpr std::string_view kBaselineMethod = "pinv";

struct ReconstructionResult {
  Image image;
  int iterations_used = 0;
  double final_residual = 0.0;
  std::vector<SolverDiagnostics> diagnostics;  // one per channel
};

/// Defaults for each executable method. D-AMP runs 30 iterations; the TV
/// solvers run up to 200 with relative-change tolerance 1e-4.
inline SolverConfig default_config(std::string_view method) {
  SolverConfig cfg;
  const auto desc = find_method(method);
  if (desc && desc->name == "damp") {
    cfg.max_iterations = 30;
    cfg.specifics.set("denoiser", "soft_threshold");
  }
  return cfg;
}

/// Runs one solver on one channel.
inline ChannelSolution reconstruct_channel(std::string_view method, const Vector& y, const SensingMatrix& a,
                                           Shape shape, const SolverConfig& cfg) {
  if (method == kBaselineMethod) {
    detail::check_dimensions(y, a, shape);
    ChannelSolution sol;
    sol.x = pinv_baseline(y, a);
    sol.final_residual = relative_residual(a, sol.x, y);
    return sol;
  }
  const MethodDescriptor desc = require_method(method);
  if (!desc.executable)
    throw UnsupportedMethodError("method '" + std::string(desc.display_name) +
                                 "' has no executable solver here; score its published raw results with "
                                 "`csbench score <raw.csv>` instead");
  if (desc.name == "l1") return tv_l1_reconstruct(y, a, shape, cfg);
  if (desc.name == "tval3") return tval3_reconstruct(y, a, shape, cfg);
  return damp_reconstruct(y, a, shape, cfg);
}

/// Channel-by-channel reconstruction of a measurement group. Channels are
/// solved independently, reassembled, and clamped into [0,1]. final_residual
/// pools all channels and is measured before clamping.
inline ReconstructionResult reconstruct(std::string_view method, const MeasurementGroup& g, const SensingMatrix& a,
                                        const SolverConfig& cfg) {
  if (method != kBaselineMethod) {
    const auto desc = require_method(method);
    if (!desc.executable) (void)reconstruct_channel(method, Vector(), a, g.shape, cfg);
  }
  if (g.m != a.m() || g.n != a.n() || g.shape.size() != a.n())
    throw PreconditionError("measurement group does not match the sensing matrix dimensions");
  if (g.per_channel.size() != 1 && g.per_channel.size() != 3)
    throw PreconditionError("measurement group must have 1 or 3 channels");

  ReconstructionResult result;
  std::vector<double> pixels;
  pixels.reserve(g.per_channel.size() * a.n());
  double residual2 = 0.0;
  double norm2 = 0.0;
  for (const auto& y : g.per_channel) {
    ChannelSolution sol = reconstruct_channel(method, y, a, g.shape, cfg);
    residual2 += (a.entries() * sol.x - y).squaredNorm();
    norm2 += y.squaredNorm();
    result.iterations_used = std::max(result.iterations_used, sol.iterations);
    pixels.insert(pixels.end(), sol.x.begin(), sol.x.end());
    result.diagnostics.push_back(std::move(sol.diagnostics));
  }
  result.final_residual = norm2 > 0 ? std::sqrt(residual2 / norm2) : std::sqrt(residual2);
  result.image = Image::from_clamped(static_cast<int>(g.per_channel.size()), g.shape.height, g.shape.width,
                                     std::move(pixels));
  return result;
}

}  // namespace csbench
