#pragma once

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include "csbench/error.hpp"
#include "csbench/image.hpp"
#include "csbench/io/image_file.hpp"

namespace csbench::io {

struct FileFailure {
  std::filesystem::path path;
  std::string message;
};

struct FolderLoadResult {
  std::vector<Image> images;
  std::vector<std::filesystem::path> sources;
  std::vector<FileFailure> failures;
};

/// Image files (by extension) directly inside `dir`, in lexicographic order.
inline std::vector<std::filesystem::path> list_image_files(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw EmptyDatasetError(dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && has_image_extension(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });
  return files;
}

/// Matches the channel count of `spec`: RGB is reduced by luma, gray is replicated.
inline Image match_channels(const Image& img, int channels) {
  if (img.channels() == channels) return img;
  return channels == 1 ? to_grayscale(img) : to_rgb(img);
}

/// Decodes every image file without resizing. Undecodable files are reported,
/// not fatal.
inline FolderLoadResult load_image_folder_raw(const std::filesystem::path& dir) {
  const auto files = list_image_files(dir);
  if (files.empty()) throw EmptyDatasetError(dir.string() + " contains no image files");
  FolderLoadResult result;
  for (const auto& file : files) {
    try {
      result.images.push_back(read_image(file));
      result.sources.push_back(file);
    } catch (const Error& e) {
      result.failures.push_back({file, e.what()});
    }
  }
  return result;
}

/// Decodes, center-crops to a square, resamples bilinearly to the dataset size
/// and converts to the dataset channel count.
inline FolderLoadResult load_image_folder(const std::filesystem::path& dir, const DatasetSpec& spec) {
  FolderLoadResult result = load_image_folder_raw(dir);
  for (auto& img : result.images) {
    Image square = img.width() == img.height() ? img : crop_center_square(img);
    img = match_channels(resize_bilinear(square, spec.width, spec.height), spec.channels);
  }
  return result;
}

}  // namespace csbench::io
