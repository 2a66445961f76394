#pragma once

#include <algorithm>
#include <cmath>

#include "csbench/image.hpp"
#include "csbench/sensing.hpp"

namespace csbench::tv {

/// Horizontal and vertical forward differences of a row-major plane. The last
/// column (row) has zero difference: reflective boundary.
struct Gradient {
  Vector horizontal;
  Vector vertical;
};

inline Gradient gradient(const Vector& x, Shape s) {
  Gradient g{Vector::Zero(x.size()), Vector::Zero(x.size())};
  for (int i = 0; i < s.height; ++i) {
    for (int j = 0; j < s.width; ++j) {
      const Eigen::Index k = static_cast<Eigen::Index>(i) * s.width + j;
      if (j + 1 < s.width) g.horizontal[k] = x[k + 1] - x[k];
      if (i + 1 < s.height) g.vertical[k] = x[k + s.width] - x[k];
    }
  }
  return g;
}

/// Adjoint of `gradient`: D^T (ph, pv).
inline Vector gradient_adjoint(const Vector& ph, const Vector& pv, Shape s) {
  Vector out = Vector::Zero(ph.size());
  for (int i = 0; i < s.height; ++i) {
    for (int j = 0; j < s.width; ++j) {
      const Eigen::Index k = static_cast<Eigen::Index>(i) * s.width + j;
      if (j + 1 < s.width) {
        out[k] -= ph[k];
        out[k + 1] += ph[k];
      }
      if (i + 1 < s.height) {
        out[k] -= pv[k];
        out[k + s.width] += pv[k];
      }
    }
  }
  return out;
}

/// Anisotropic total variation: l1 norm of both difference fields.
inline double anisotropic(const Vector& x, Shape s) {
  const Gradient g = gradient(x, s);
  return g.horizontal.lpNorm<1>() + g.vertical.lpNorm<1>();
}

/// Proximal operator of t * TV_aniso, argmin_x 0.5||x - v||^2 + t TV(x),
/// solved on the dual: x = v - t D^T p with |p| <= 1 elementwise. Fast
/// projected gradient on p with step 1/(8t); ||D||^2 <= 8. The dual state is
/// kept between calls so repeated proximal steps warm-start.
class Prox {
 public:
  explicit Prox(Shape shape) : shape_(shape), ph_(Vector::Zero(static_cast<Eigen::Index>(shape.size()))),
                               pv_(ph_) {}

  Vector operator()(const Vector& v, double t, int iterations) {
    if (t <= 0) return v;
    Vector qh = ph_, qv = pv_;
    double momentum = 1.0;
    const double step = 1.0 / (8.0 * t);
    for (int k = 0; k < iterations; ++k) {
      const Vector x = v - t * gradient_adjoint(qh, qv, shape_);
      const Gradient g = gradient(x, shape_);
      const Vector nh = (qh + step * g.horizontal).cwiseMax(-1.0).cwiseMin(1.0);
      const Vector nv = (qv + step * g.vertical).cwiseMax(-1.0).cwiseMin(1.0);
      const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      const double beta = (momentum - 1.0) / next;
      qh = nh + beta * (nh - ph_);
      qv = nv + beta * (nv - pv_);
      ph_ = nh;
      pv_ = nv;
      momentum = next;
    }
    return v - t * gradient_adjoint(ph_, pv_, shape_);
  }

  void reset() {
    ph_.setZero();
    pv_.setZero();
  }

 private:
  Shape shape_;
  Vector ph_;
  Vector pv_;
};

}  // namespace csbench::tv
