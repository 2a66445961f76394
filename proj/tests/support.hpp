#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "csbench/image.hpp"
#include "csbench/io/idx.hpp"

namespace csbench::testing {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(CSBENCH_FIXTURE_DIR) / name; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("csbench-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Image random_image(std::mt19937_64& rng, int channels, int height, int width) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> px(static_cast<std::size_t>(channels) * height * width);
  for (double& v : px) v = u(rng);
  return {channels, height, width, std::move(px)};
}

/// Values that survive 8-bit storage unchanged.
inline Image random_byte_image(std::mt19937_64& rng, int channels, int height, int width) {
  std::uniform_int_distribution<int> u(0, 255);
  std::vector<double> px(static_cast<std::size_t>(channels) * height * width);
  for (double& v : px) v = u(rng) / 255.0;
  return {channels, height, width, std::move(px)};
}

/// Left half dark, right half bright.
inline Image two_block_image(int side = 32, double low = 0.2, double high = 0.8) {
  std::vector<double> px(static_cast<std::size_t>(side) * side);
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x) px[static_cast<std::size_t>(y) * side + x] = x < side / 2 ? low : high;
  return {1, side, side, std::move(px)};
}

/// The 100-digit MNIST fixture, zero-padded to 32x32.
inline std::vector<Image> mnist_digits() {
  std::vector<Image> out;
  for (const auto& d : io::load_idx(fixture("mnist100-idx3-ubyte"))) out.push_back(pad_to(d, 32, 32));
  return out;
}

}  // namespace csbench::testing
