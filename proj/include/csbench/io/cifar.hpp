#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "csbench/error.hpp"
#include "csbench/image.hpp"
#include "csbench/io/binary.hpp"

namespace csbench::io {

inline constexpr std::size_t kCifarRecordBytes = 3073;

/// CIFAR-10 binary batch: records of one label byte and 3x32x32 channel-major
/// pixel bytes. Labels are dropped.
inline std::vector<Image> parse_cifar_binary(std::span<const std::uint8_t> bytes,
                                             const std::string& source = "cifar") {
  if (bytes.size() % kCifarRecordBytes != 0)
    throw FormatError(source + ": length " + std::to_string(bytes.size()) + " is not a multiple of 3073");
  std::vector<Image> images;
  images.reserve(bytes.size() / kCifarRecordBytes);
  for (std::size_t off = 0; off < bytes.size(); off += kCifarRecordBytes) {
    std::vector<double> px(kCifarRecordBytes - 1);
    for (std::size_t k = 0; k < px.size(); ++k) px[k] = bytes[off + 1 + k] / 255.0;
    images.emplace_back(3, 32, 32, std::move(px));
  }
  return images;
}

inline std::vector<Image> load_cifar_binary(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_cifar_binary(bytes, path.string());
}

}  // namespace csbench::io
