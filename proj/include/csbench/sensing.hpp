#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "csbench/error.hpp"
#include "csbench/image.hpp"
#include "csbench/io/binary.hpp"
#include "csbench/random.hpp"

namespace csbench {

using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class MatrixKind { gaussian, gaussian_orthonormal_rows, identity };

inline std::string_view to_string(MatrixKind kind) {
  switch (kind) {
    case MatrixKind::gaussian: return "gaussian";
    case MatrixKind::gaussian_orthonormal_rows: return "gaussian_orthonormal_rows";
    case MatrixKind::identity: return "identity";
  }
  return "unknown";
}

inline MatrixKind parse_matrix_kind(std::string_view text) {
  if (text == "gaussian") return MatrixKind::gaussian;
  if (text == "gaussian_orthonormal_rows" || text == "orthonormal" || text == "orth") {
    return MatrixKind::gaussian_orthonormal_rows;
  }
  if (text == "identity") return MatrixKind::identity;
  throw ConfigError("unknown sensing kind '" + std::string(text) + "'");
}

/// Dense m x n measurement operator. Immutable after construction.
class SensingMatrix {
 public:
  SensingMatrix(RowMatrix entries, std::uint64_t seed, MatrixKind kind)
      : entries_(std::move(entries)), seed_(seed), kind_(kind) {
    if (rows() < 1 || rows() > cols()) throw PreconditionError("sensing matrix requires 1 <= m <= n");
  }

  std::size_t m() const { return static_cast<std::size_t>(entries_.rows()); }
  std::size_t n() const { return static_cast<std::size_t>(entries_.cols()); }
  std::uint64_t seed() const { return seed_; }
  MatrixKind kind() const { return kind_; }
  const RowMatrix& entries() const { return entries_; }

  Vector apply(const Vector& x) const {
    if (static_cast<std::size_t>(x.size()) != n()) throw PreconditionError("sensing input length != n");
    return entries_ * x;
  }

  Vector apply_transpose(const Vector& y) const {
    if (static_cast<std::size_t>(y.size()) != m()) throw PreconditionError("adjoint input length != m");
    return entries_.transpose() * y;
  }

  /// Largest squared singular value estimate from `iterations` power steps on
  /// A^T A, started from a fixed-seed Gaussian vector.
  double lipschitz_estimate(int iterations = 20) const {
    NormalStream rng(0x5eed'1ab5ULL);
    Vector v(static_cast<Eigen::Index>(n()));
    for (auto& e : v) e = rng.normal();
    v.normalize();
    double lambda = 0.0;
    for (int k = 0; k < iterations; ++k) {
      Vector w = entries_.transpose() * (entries_ * v);
      lambda = w.norm();
      if (lambda == 0.0) return 0.0;
      v = w / lambda;
    }
    return lambda;
  }

 private:
  Eigen::Index rows() const { return entries_.rows(); }
  Eigen::Index cols() const { return entries_.cols(); }

  RowMatrix entries_;
  std::uint64_t seed_;
  MatrixKind kind_;
};

/// Measurement count for a compression ratio n/m: round(n / ratio), at least 1.
inline std::size_t ratio_to_m(std::size_t n, double ratio) {
  if (n < 1) throw PreconditionError("signal length must be >= 1");
  if (!(ratio >= 1.0)) throw PreconditionError("compression ratio must be >= 1");
  const auto m = static_cast<std::size_t>(std::llround(static_cast<double>(n) / ratio));
  return m < 1 ? 1 : m;
}

/// Seeded operator construction.
///
/// gaussian: i.i.d. N(0, 1/m) entries drawn row-major from NormalStream(seed).
/// gaussian_orthonormal_rows: the same draw, rows orthonormalized by a
/// Householder QR of A^T with signs fixed so diag(R) > 0 (the Gram-Schmidt basis).
/// identity: requires m == n.
inline SensingMatrix build_matrix(std::uint64_t seed, std::size_t m, std::size_t n, MatrixKind kind) {
  if (m < 1 || m > n) throw PreconditionError("build_matrix requires 1 <= m <= n");
  const auto rows = static_cast<Eigen::Index>(m);
  const auto cols = static_cast<Eigen::Index>(n);
  if (kind == MatrixKind::identity) {
    if (m != n) throw PreconditionError("identity sensing requires m == n");
    return {RowMatrix::Identity(rows, cols), seed, kind};
  }

  RowMatrix a(rows, cols);
  NormalStream rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = scale * rng.normal();
  if (kind == MatrixKind::gaussian) return {std::move(a), seed, kind};

  Eigen::MatrixXd at = a.transpose();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(at);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(cols, rows);
  const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(rows, rows).template triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < rows; ++k) {
    if (r(k, k) < 0) q.col(k) = -q.col(k);
  }
  return {RowMatrix(q.transpose()), seed, kind};
}

/// Per-channel measurements of one image.
struct MeasurementGroup {
  std::vector<Vector> per_channel;
  std::size_t m = 0;
  std::size_t n = 0;
  double ratio = 1.0;
  Shape shape;
};

/// Channel-wise acquisition: each channel is flattened row-major and sensed by
/// the same operator.
inline MeasurementGroup sense_image(const Image& img, const SensingMatrix& a, double declared_ratio = 0.0) {
  if (img.plane_size() != a.n())
    throw PreconditionError("sensing matrix expects n=" + std::to_string(a.n()) + " but image has " +
                            std::to_string(img.plane_size()) + " pixels per channel");
  MeasurementGroup group;
  group.m = a.m();
  group.n = a.n();
  group.ratio = declared_ratio > 0.0 ? declared_ratio : static_cast<double>(a.n()) / static_cast<double>(a.m());
  group.shape = img.shape();
  for (int c = 0; c < img.channels(); ++c) {
    const auto ch = img.channel(c);
    group.per_channel.push_back(a.apply(Eigen::Map<const Vector>(ch.data(), static_cast<Eigen::Index>(ch.size()))));
  }
  return group;
}

/// Flat export: m and n as little-endian u64, then m*n little-endian f64 entries row-major.
inline std::vector<std::uint8_t> encode_matrix(const SensingMatrix& a) {
  io::ByteWriter w;
  w.u64(a.m());
  w.u64(a.n());
  const auto& e = a.entries();
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) w.f64(e(i, j));
  return w.bytes();
}

/// Imported matrices carry no seed; kind is recorded as gaussian.
inline SensingMatrix decode_matrix(std::span<const std::uint8_t> bytes, const std::string& source = "matrix") {
  io::ByteReader r(bytes, source);
  const std::uint64_t m = r.u64();
  const std::uint64_t n = r.u64();
  if (m < 1 || m > n || n > (1ULL << 28)) throw FormatError(source + ": invalid matrix dimensions");
  if (r.remaining() != m * n * 8) throw FormatError(source + ": payload size does not match m*n");
  RowMatrix e(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) e(i, j) = r.f64();
  return {std::move(e), 0, MatrixKind::gaussian};
}

inline void save_matrix(const std::filesystem::path& path, const SensingMatrix& a) {
  io::write_file(path, encode_matrix(a));
}

inline SensingMatrix load_matrix(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  return decode_matrix(bytes, path.string());
}

}  // namespace csbench
