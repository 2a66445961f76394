#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "csbench/error.hpp"
#include "csbench/image.hpp"
#include "csbench/io/binary.hpp"

namespace csbench::io {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;

/// Decodes an IDX3 unsigned-byte image file (the MNIST layout). Each record
/// becomes a single-channel image with bytes scaled by 1/255.
inline std::vector<Image> parse_idx(std::span<const std::uint8_t> bytes, const std::string& source = "idx") {
  if (bytes.size() < 16) throw FormatError(source + ": file shorter than IDX header");
  const std::uint32_t magic = load_be32(bytes.data());
  if (magic != kIdxImageMagic) throw FormatError(source + ": bad IDX magic number");
  const std::uint32_t count = load_be32(bytes.data() + 4);
  const std::uint32_t rows = load_be32(bytes.data() + 8);
  const std::uint32_t cols = load_be32(bytes.data() + 12);
  if (rows == 0 || cols == 0) throw FormatError(source + ": zero image dimension");
  const std::size_t plane = static_cast<std::size_t>(rows) * cols;
  if (bytes.size() - 16 < plane * count) throw FormatError(source + ": truncated payload");

  std::vector<Image> images;
  images.reserve(count);
  const std::uint8_t* p = bytes.data() + 16;
  for (std::uint32_t i = 0; i < count; ++i, p += plane) {
    std::vector<double> px(plane);
    for (std::size_t k = 0; k < plane; ++k) px[k] = p[k] / 255.0;
    images.emplace_back(1, static_cast<int>(rows), static_cast<int>(cols), std::move(px));
  }
  return images;
}

inline std::vector<Image> load_idx(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_idx(bytes, path.string());
}

/// Big-endian IDX3 header followed by one byte per pixel.
inline std::vector<std::uint8_t> encode_idx(std::span<const Image> images) {
  if (images.empty()) throw PreconditionError("encode_idx needs at least one image");
  const auto rows = static_cast<std::uint32_t>(images.front().height());
  const auto cols = static_cast<std::uint32_t>(images.front().width());
  std::vector<std::uint8_t> out;
  auto be32 = [&](std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
  };
  be32(kIdxImageMagic);
  be32(static_cast<std::uint32_t>(images.size()));
  be32(rows);
  be32(cols);
  for (const auto& img : images) {
    if (img.channels() != 1 || img.height() != static_cast<int>(rows) || img.width() != static_cast<int>(cols))
      throw PreconditionError("encode_idx needs equally sized single-channel images");
    for (double v : img.pixels()) out.push_back(static_cast<std::uint8_t>(std::lround(v * 255.0)));
  }
  return out;
}

}  // namespace csbench::io
