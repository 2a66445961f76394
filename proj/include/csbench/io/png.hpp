#pragma once

#include <png.h>

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "csbench/error.hpp"
#include "csbench/image.hpp"

namespace csbench::io {

inline bool is_png(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

/// Gray and gray+alpha PNGs decode to one channel; everything else to RGB.
/// Alpha is dropped (composited over black by libpng).
inline Image decode_png(std::span<const std::uint8_t> bytes, const std::string& source = "png") {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
    throw FormatError(source + ": " + image.message);
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int channels = color ? 3 : 1;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw FormatError(source + ": " + msg);
  }
  const int width = static_cast<int>(image.width);
  const int height = static_cast<int>(image.height);
  const std::size_t plane = static_cast<std::size_t>(width) * height;
  std::vector<double> px(plane * channels);
  for (std::size_t i = 0; i < plane; ++i)
    for (int c = 0; c < channels; ++c) px[c * plane + i] = buffer[i * channels + c] / 255.0;
  return {channels, height, width, std::move(px)};
}

/// 8-bit gray or RGB PNG.
inline std::vector<std::uint8_t> encode_png(const Image& img) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = img.channels() == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  const std::size_t plane = img.plane_size();
  std::vector<std::uint8_t> buffer(plane * img.channels());
  for (std::size_t i = 0; i < plane; ++i)
    for (int c = 0; c < img.channels(); ++c)
      buffer[i * img.channels() + c] = static_cast<std::uint8_t>(std::lround(img.channel(c)[i] * 255.0));

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, buffer.data(), 0, nullptr))
    throw FormatError(std::string("png encode: ") + image.message);
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, buffer.data(), 0, nullptr))
    throw FormatError(std::string("png encode: ") + image.message);
  out.resize(size);
  return out;
}

}  // namespace csbench::io
