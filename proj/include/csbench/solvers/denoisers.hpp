#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <string_view>

#include "csbench/error.hpp"
#include "csbench/solvers/config.hpp"
#include "csbench/solvers/total_variation.hpp"

namespace csbench {

/// Knobs shared by the built-in denoisers, read from solver specifics.
struct DenoiserParams {
  double threshold_scale = 1.0;  // soft_threshold: threshold = scale * sigma
  double tv_scale = 1.0;         // tv_chambolle: weight = scale * sigma
  int tv_iterations = 30;

  static DenoiserParams from(const Specifics& s) {
    DenoiserParams p;
    p.threshold_scale = s.get_double("threshold_scale", p.threshold_scale);
    p.tv_scale = s.get_double("tv_scale", p.tv_scale);
    p.tv_iterations = static_cast<int>(s.get_int("tv_iterations", p.tv_iterations));
    return p;
  }
};

inline constexpr std::array<std::string_view, 3> kDenoisers{"soft_threshold", "median3", "tv_chambolle"};

inline bool is_denoiser(std::string_view name) {
  return std::find(kDenoisers.begin(), kDenoisers.end(), name) != kDenoisers.end();
}

inline Vector soft_threshold(const Vector& v, double threshold) {
  if (threshold <= 0) return v;
  return v.unaryExpr([threshold](double e) {
    const double mag = std::abs(e) - threshold;
    return mag > 0 ? std::copysign(mag, e) : 0.0;
  });
}

/// 3x3 median with edge replication.
inline Vector median3(const Vector& v, Shape s) {
  Vector out(v.size());
  std::array<double, 9> window{};
  for (int i = 0; i < s.height; ++i) {
    for (int j = 0; j < s.width; ++j) {
      int k = 0;
      for (int di = -1; di <= 1; ++di) {
        const int ii = std::clamp(i + di, 0, s.height - 1);
        for (int dj = -1; dj <= 1; ++dj) {
          const int jj = std::clamp(j + dj, 0, s.width - 1);
          window[k++] = v[static_cast<Eigen::Index>(ii) * s.width + jj];
        }
      }
      std::nth_element(window.begin(), window.begin() + 4, window.end());
      out[static_cast<Eigen::Index>(i) * s.width + j] = window[4];
    }
  }
  return out;
}

/// Applies the named denoiser to `v` at noise level `sigma`.
inline Vector denoise(std::string_view name, const Vector& v, double sigma, Shape shape,
                      const DenoiserParams& params = {}) {
  if (!(sigma >= 0)) throw PreconditionError("denoiser sigma must be >= 0");
  if (static_cast<std::size_t>(v.size()) != shape.size()) throw PreconditionError("denoiser input does not match shape");
  if (name == "soft_threshold") return soft_threshold(v, params.threshold_scale * sigma);
  if (name == "median3") return median3(v, shape);
  if (name == "tv_chambolle") {
    tv::Prox prox(shape);
    return prox(v, params.tv_scale * sigma, params.tv_iterations);
  }
  throw ConfigError("unknown denoiser '" + std::string(name) + "'");
}

}  // namespace csbench
