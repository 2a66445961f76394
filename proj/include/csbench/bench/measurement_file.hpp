#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "csbench/error.hpp"
#include "csbench/io/binary.hpp"
#include "csbench/sensing.hpp"

namespace csbench::bench {

/// Measurement container, all fields little-endian:
///
///   offset  size  field
///        0     4  magic "CSMG"
///        4     4  u32 format version (1)
///        8     8  u64 m
///       16     8  u64 n
///       24     4  u32 channels
///       28     4  u32 height
///       32     4  u32 width
///       36     4  u32 kind (0 gaussian, 1 gaussian_orthonormal_rows, 2 identity)
///       40     8  u64 seed
///       48     8  f64 declared compression ratio
///       56        channels x m f64 measurements, channel-major
///
/// The operator is not stored; (seed, kind, m, n) rebuild it exactly.
inline constexpr std::uint32_t kMeasurementFormatVersion = 1;

struct MeasurementFile {
  MeasurementGroup group;
  std::uint64_t seed = 0;
  MatrixKind kind = MatrixKind::gaussian_orthonormal_rows;

  SensingMatrix rebuild_matrix() const { return build_matrix(seed, group.m, group.n, kind); }
};

inline std::vector<std::uint8_t> encode_measurements(const MeasurementFile& f) {
  const auto& g = f.group;
  io::ByteWriter w;
  w.raw("CSMG");
  w.u32(kMeasurementFormatVersion);
  w.u64(g.m);
  w.u64(g.n);
  w.u32(static_cast<std::uint32_t>(g.per_channel.size()));
  w.u32(static_cast<std::uint32_t>(g.shape.height));
  w.u32(static_cast<std::uint32_t>(g.shape.width));
  w.u32(static_cast<std::uint32_t>(f.kind));
  w.u64(f.seed);
  w.f64(g.ratio);
  for (const auto& y : g.per_channel) {
    if (static_cast<std::size_t>(y.size()) != g.m) throw PreconditionError("measurement vector length != m");
    for (double v : y) w.f64(v);
  }
  return w.bytes();
}

inline MeasurementFile decode_measurements(std::span<const std::uint8_t> bytes, const std::string& source = "measurements") {
  io::ByteReader r(bytes, source);
  if (r.raw(4) != "CSMG") throw FormatError(source + ": not a measurement file");
  const std::uint32_t version = r.u32();
  if (version != kMeasurementFormatVersion)
    throw FormatError(source + ": unsupported measurement format version " + std::to_string(version));
  MeasurementFile f;
  auto& g = f.group;
  g.m = r.u64();
  g.n = r.u64();
  const std::uint32_t channels = r.u32();
  g.shape.height = static_cast<int>(r.u32());
  g.shape.width = static_cast<int>(r.u32());
  const std::uint32_t kind = r.u32();
  f.seed = r.u64();
  g.ratio = r.f64();
  if (kind > 2) throw FormatError(source + ": unknown sensing kind " + std::to_string(kind));
  f.kind = static_cast<MatrixKind>(kind);
  if (channels != 1 && channels != 3) throw FormatError(source + ": channel count must be 1 or 3");
  if (g.m < 1 || g.m > g.n || g.shape.size() != g.n) throw FormatError(source + ": inconsistent m, n and shape");
  if (r.remaining() != channels * g.m * 8) throw FormatError(source + ": payload size does not match header");
  for (std::uint32_t c = 0; c < channels; ++c) {
    Vector y(static_cast<Eigen::Index>(g.m));
    for (auto& v : y) v = r.f64();
    g.per_channel.push_back(std::move(y));
  }
  return f;
}

inline void save_measurements(const std::filesystem::path& path, const MeasurementFile& f) {
  io::write_file(path, encode_measurements(f));
}

inline MeasurementFile load_measurements(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  return decode_measurements(bytes, path.string());
}

}  // namespace csbench::bench
