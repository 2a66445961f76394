#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "csbench/error.hpp"
#include "csbench/image.hpp"

namespace csbench::io {

/// Binary PGM (P5) or PPM (P6) with maxval up to 65535.
inline Image decode_pnm(std::span<const std::uint8_t> bytes, const std::string& source = "pnm") {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_uint = [&] {
    skip_space();
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) throw FormatError(source + ": malformed PNM header");
    long v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos++] - '0');
      if (v > 1'000'000) throw FormatError(source + ": PNM header value too large");
    }
    return static_cast<int>(v);
  };

  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6'))
    throw FormatError(source + ": not a binary PGM/PPM file");
  const int channels = bytes[1] == '5' ? 1 : 3;
  pos = 2;
  const int width = read_uint();
  const int height = read_uint();
  const int maxval = read_uint();
  if (width < 1 || height < 1 || maxval < 1 || maxval > 65535) throw FormatError(source + ": bad PNM dimensions");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw FormatError(source + ": malformed PNM header");
  ++pos;

  const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
  const std::size_t plane = static_cast<std::size_t>(width) * height;
  if (bytes.size() - pos < plane * channels * sample_bytes) throw FormatError(source + ": truncated payload");

  std::vector<double> px(plane * channels);
  for (std::size_t i = 0; i < plane; ++i) {
    for (int c = 0; c < channels; ++c) {
      const std::size_t at = pos + (i * channels + c) * sample_bytes;
      const unsigned raw = sample_bytes == 2 ? (unsigned{bytes[at]} << 8) | bytes[at + 1] : bytes[at];
      px[c * plane + i] = std::min(1.0, static_cast<double>(raw) / maxval);
    }
  }
  return {channels, height, width, std::move(px)};
}

/// 8-bit P5 for one channel, P6 for three.
inline std::vector<std::uint8_t> encode_pnm(const Image& img) {
  const std::string header = std::string(img.channels() == 1 ? "P5" : "P6") + "\n" + std::to_string(img.width()) +
                             " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const std::size_t plane = img.plane_size();
  for (std::size_t i = 0; i < plane; ++i)
    for (int c = 0; c < img.channels(); ++c)
      out.push_back(static_cast<std::uint8_t>(std::lround(img.channel(c)[i] * 255.0)));
  return out;
}

}  // namespace csbench::io
