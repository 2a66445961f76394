#pragma once

#include <Eigen/Cholesky>

#include "csbench/error.hpp"
#include "csbench/sensing.hpp"

namespace csbench {

/// Minimum-norm solution of A x = y, x = A^T (A A^T)^{-1} y. The Cholesky
/// factor of A A^T is computed once per operator; orthonormal-row and identity
/// operators skip it because A A^T = I.
class LeastNormSolver {
 public:
  explicit LeastNormSolver(const SensingMatrix& a) : a_(&a) {
    if (a.kind() == MatrixKind::gaussian) {
      const Eigen::MatrixXd gram = a.entries() * a.entries().transpose();
      llt_.compute(gram);
      if (llt_.info() != Eigen::Success) throw LinalgError("A A^T is numerically singular");
      // Guard against a factorization that succeeded on a nearly rank-deficient Gram matrix.
      const auto diag = llt_.matrixLLT().diagonal();
      if (diag.minCoeff() <= 1e-12 * diag.maxCoeff()) throw LinalgError("A A^T is numerically singular");
      factored_ = true;
    }
  }

  Vector solve(const Vector& y) const {
    if (static_cast<std::size_t>(y.size()) != a_->m()) throw PreconditionError("measurement length != m");
    if (!factored_) return a_->entries().transpose() * y;
    return a_->entries().transpose() * llt_.solve(y);
  }

 private:
  const SensingMatrix* a_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  bool factored_ = false;
};

inline Vector pinv_baseline(const Vector& y, const SensingMatrix& a) { return LeastNormSolver(a).solve(y); }

}  // namespace csbench
