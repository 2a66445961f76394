#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "csbench/error.hpp"
#include "csbench/rational.hpp"

namespace csbench {

/// Height x width of one image plane.
struct Shape {
  int height = 0;
  int width = 0;

  constexpr std::size_t size() const { return static_cast<std::size_t>(height) * static_cast<std::size_t>(width); }
  friend constexpr bool operator==(Shape, Shape) = default;
};

/// Multi-channel image with planar (channel-major, then row-major) storage and
/// every sample in [0,1]. Immutable once constructed.
class Image {
 public:
  Image() = default;

  Image(int channels, int height, int width, std::vector<double> pixels)
      : channels_(channels), height_(height), width_(width), pixels_(std::move(pixels)) {
    if (channels_ != 1 && channels_ != 3)
      throw PreconditionError("image must have 1 or 3 channels, got " + std::to_string(channels_));
    if (height_ < 1 || width_ < 1) throw PreconditionError("image dimensions must be positive");
    if (pixels_.size() != static_cast<std::size_t>(channels_) * plane_size())
      throw PreconditionError("pixel array length does not match channels x height x width");
    for (double v : pixels_) {
      if (!(v >= 0.0 && v <= 1.0)) throw PreconditionError("pixel value outside [0,1]");
    }
  }

  /// Uniform image.
  static Image filled(int channels, int height, int width, double value) {
    return {channels, height, width,
            std::vector<double>(static_cast<std::size_t>(channels) * height * width, value)};
  }

  /// Builds an image from arbitrary reals, clamping each into [0,1]. NaN maps to 0.
  static Image from_clamped(int channels, int height, int width, std::vector<double> values) {
    for (double& v : values) v = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
    return {channels, height, width, std::move(values)};
  }

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  Shape shape() const { return {height_, width_}; }
  std::size_t plane_size() const { return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_); }
  bool empty() const { return pixels_.empty(); }

  double at(int c, int y, int x) const {
    return pixels_[static_cast<std::size_t>(c) * plane_size() + static_cast<std::size_t>(y) * width_ + x];
  }

  std::span<const double> pixels() const { return pixels_; }

  /// Row-major flattening of one channel.
  std::span<const double> channel(int c) const {
    return std::span<const double>(pixels_).subspan(static_cast<std::size_t>(c) * plane_size(), plane_size());
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<double> pixels_;
};

/// Size and scoring weight of a benchmark dataset.
struct DatasetSpec {
  std::string name;
  int channels = 1;
  int width = 32;
  int height = 32;
  Rational weight{0};
};

inline const std::array<DatasetSpec, 6>& builtin_datasets() {
  static const std::array<DatasetSpec, 6> specs{{
      {"mnist", 1, 32, 32, Rational(1, 21)},
      {"celeba", 3, 64, 64, Rational(4, 21)},
      {"cifar10", 3, 32, 32, Rational(3, 21)},
      {"cifar10_gray", 1, 32, 32, Rational(2, 21)},
      {"bigset", 3, 64, 64, Rational(6, 21)},
      {"bigset_gray", 1, 64, 64, Rational(5, 21)},
  }};
  return specs;
}

namespace detail {

inline std::string alnum_lower(std::string_view text) {
  std::string out;
  for (char ch : text) {
    const auto u = static_cast<unsigned char>(ch);
    if (std::isalnum(u)) out.push_back(static_cast<char>(std::tolower(u)));
  }
  return out;
}

}  // namespace detail

/// Resolves a dataset name case-insensitively. Accepts the canonical ids and
/// display forms such as "CIFAR10(Gray)", "Bigset Gray" or "CELEBA".
inline std::optional<DatasetSpec> find_dataset(std::string_view name) {
  const std::string key = detail::alnum_lower(name);
  for (const auto& spec : builtin_datasets()) {
    if (detail::alnum_lower(spec.name) == key) return spec;
  }
  if (key == "cifar10grayscaled") return builtin_datasets()[3];
  if (key == "bigsetgrayscaled") return builtin_datasets()[5];
  return std::nullopt;
}

struct PatchConfig {
  int patch_size = 64;
  int stride = 64;
  bool augment = false;
};

/// BT.601 luma: y = 0.299 r + 0.587 g + 0.114 b.
inline Image to_grayscale(const Image& img) {
  if (img.channels() != 3) throw PreconditionError("to_grayscale expects a 3-channel image");
  const auto r = img.channel(0);
  const auto g = img.channel(1);
  const auto b = img.channel(2);
  std::vector<double> out(img.plane_size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (r[i] == g[i] && g[i] == b[i]) {
      out[i] = r[i];
    } else {
      out[i] = std::clamp(0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i], 0.0, 1.0);
    }
  }
  return {1, img.height(), img.width(), std::move(out)};
}

/// Replicates a single channel into three.
inline Image to_rgb(const Image& img) {
  if (img.channels() == 3) return img;
  std::vector<double> out;
  out.reserve(3 * img.plane_size());
  for (int c = 0; c < 3; ++c) out.insert(out.end(), img.channel(0).begin(), img.channel(0).end());
  return {3, img.height(), img.width(), std::move(out)};
}

/// Centers the image on a zero canvas of the requested size. When the extra
/// space is odd the spare row/column goes to the bottom/right.
inline Image pad_to(const Image& img, int width, int height) {
  if (width < img.width() || height < img.height())
    throw PreconditionError("pad_to target " + std::to_string(width) + "x" + std::to_string(height) +
                            " is smaller than source " + std::to_string(img.width()) + "x" +
                            std::to_string(img.height()));
  const int top = (height - img.height()) / 2;
  const int left = (width - img.width()) / 2;
  std::vector<double> out(static_cast<std::size_t>(img.channels()) * width * height, 0.0);
  for (int c = 0; c < img.channels(); ++c)
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x)
        out[(static_cast<std::size_t>(c) * height + y + top) * width + x + left] = img.at(c, y, x);
  return {img.channels(), height, width, std::move(out)};
}

/// Copies the width x height window whose top-left corner is (top, left).
inline Image crop(const Image& img, int top, int left, int width, int height) {
  if (top < 0 || left < 0 || width < 1 || height < 1 || top + height > img.height() || left + width > img.width())
    throw PreconditionError("crop window outside image");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(img.channels()) * width * height);
  for (int c = 0; c < img.channels(); ++c)
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) out.push_back(img.at(c, top + y, left + x));
  return {img.channels(), height, width, std::move(out)};
}

/// Inverse of pad_to: keeps the centered width x height window.
inline Image crop_center(const Image& img, int width, int height) {
  return crop(img, (img.height() - height) / 2, (img.width() - width) / 2, width, height);
}

/// Largest centered square.
inline Image crop_center_square(const Image& img) {
  const int side = std::min(img.width(), img.height());
  return crop_center(img, side, side);
}

/// Bilinear resampling with half-pixel center alignment and edge clamping.
inline Image resize_bilinear(const Image& img, int width, int height) {
  if (width < 1 || height < 1) throw PreconditionError("resize target must be positive");
  if (width == img.width() && height == img.height()) return img;
  const double sy = static_cast<double>(img.height()) / height;
  const double sx = static_cast<double>(img.width()) / width;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(img.channels()) * width * height);
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < height; ++y) {
      const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height() - 1.0);
      const int y0 = static_cast<int>(fy);
      const int y1 = std::min(y0 + 1, img.height() - 1);
      const double wy = fy - y0;
      for (int x = 0; x < width; ++x) {
        const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width() - 1.0);
        const int x0 = static_cast<int>(fx);
        const int x1 = std::min(x0 + 1, img.width() - 1);
        const double wx = fx - x0;
        const double top = (1 - wx) * img.at(c, y0, x0) + wx * img.at(c, y0, x1);
        const double bottom = (1 - wx) * img.at(c, y1, x0) + wx * img.at(c, y1, x1);
        out.push_back(std::clamp((1 - wy) * top + wy * bottom, 0.0, 1.0));
      }
    }
  }
  return {img.channels(), height, width, std::move(out)};
}

/// Rotates 90 degrees counter-clockwise.
inline Image rotate90(const Image& img) {
  const int h = img.height();
  const int w = img.width();
  std::vector<double> out;
  out.reserve(img.pixels().size());
  // Output is w rows by h columns: out(y, x) = in(x, w - 1 - y).
  for (int c = 0; c < img.channels(); ++c)
    for (int y = 0; y < w; ++y)
      for (int x = 0; x < h; ++x) out.push_back(img.at(c, x, w - 1 - y));
  return {img.channels(), w, h, std::move(out)};
}

inline Image flip_horizontal(const Image& img) {
  std::vector<double> out;
  out.reserve(img.pixels().size());
  for (int c = 0; c < img.channels(); ++c)
    for (int y = 0; y < img.height(); ++y)
      for (int x = img.width() - 1; x >= 0; --x) out.push_back(img.at(c, y, x));
  return {img.channels(), img.height(), img.width(), std::move(out)};
}

/// All fully contained patches on the stride grid, in row-major offset order.
/// With augmentation every patch expands to 8 variants: rotations by 0, 90,
/// 180 and 270 degrees, then the horizontal flip of each of those.
inline std::vector<Image> extract_patches(const Image& img, const PatchConfig& cfg) {
  if (cfg.patch_size < 1 || cfg.stride < 1) throw PreconditionError("patch size and stride must be >= 1");
  if (cfg.patch_size > std::min(img.width(), img.height()))
    throw PreconditionError("patch size " + std::to_string(cfg.patch_size) + " exceeds image " +
                            std::to_string(img.width()) + "x" + std::to_string(img.height()));
  std::vector<Image> patches;
  for (int top = 0; top + cfg.patch_size <= img.height(); top += cfg.stride) {
    for (int left = 0; left + cfg.patch_size <= img.width(); left += cfg.stride) {
      Image patch = crop(img, top, left, cfg.patch_size, cfg.patch_size);
      if (!cfg.augment) {
        patches.push_back(std::move(patch));
        continue;
      }
      std::array<Image, 4> rotations{patch, {}, {}, {}};
      for (int r = 1; r < 4; ++r) rotations[r] = rotate90(rotations[r - 1]);
      for (const auto& rot : rotations) patches.push_back(rot);
      for (const auto& rot : rotations) patches.push_back(flip_horizontal(rot));
    }
  }
  return patches;
}

}  // namespace csbench
