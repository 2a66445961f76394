#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <string>

#include "csbench/error.hpp"
#include "csbench/image.hpp"
#include "csbench/io/binary.hpp"
#include "csbench/io/png.hpp"
#include "csbench/io/pnm.hpp"

namespace csbench::io {

inline std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return ext;
}

inline bool has_image_extension(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  return ext == ".png" || ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

/// Decodes PNG or binary PGM/PPM, chosen by file signature.
inline Image read_image(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (is_png(bytes)) return decode_png(bytes, path.string());
  if (bytes.size() >= 2 && bytes[0] == 'P') return decode_pnm(bytes, path.string());
  throw FormatError(path.string() + ": unrecognized image format");
}

/// Encodes by extension: .png as PNG, .pgm/.ppm/.pnm as binary PNM.
inline void write_image(const std::filesystem::path& path, const Image& img) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") {
    write_file(path, encode_png(img));
  } else if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") {
    write_file(path, encode_pnm(img));
  } else {
    throw PreconditionError("unsupported output image extension '" + ext + "'");
  }
}

}  // namespace csbench::io
