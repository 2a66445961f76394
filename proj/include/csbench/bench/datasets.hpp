#pragma once

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "csbench/error.hpp"
#include "csbench/image.hpp"
#include "csbench/io/cifar.hpp"
#include "csbench/io/idx.hpp"
#include "csbench/io/image_file.hpp"
#include "csbench/io/image_folder.hpp"

namespace csbench::bench {

struct LoadedDataset {
  DatasetSpec spec;
  std::vector<Image> images;
  std::vector<io::FileFailure> failures;
};

enum class SourceFormat { automatic, idx, cifar, folder };

inline SourceFormat parse_source_format(const std::string& text) {
  if (text == "auto") return SourceFormat::automatic;
  if (text == "idx") return SourceFormat::idx;
  if (text == "cifar") return SourceFormat::cifar;
  if (text == "folder") return SourceFormat::folder;
  throw ConfigError("unknown source format '" + text + "' (expected auto, idx, cifar or folder)");
}

/// Directories load as image folders; files load as IDX for mnist and as
/// CIFAR-10 binary batches for the cifar datasets.
inline SourceFormat resolve_format(const DatasetSpec& spec, const std::filesystem::path& path, SourceFormat format) {
  if (format != SourceFormat::automatic) return format;
  if (std::filesystem::is_directory(path)) return SourceFormat::folder;
  if (spec.name == "mnist") return SourceFormat::idx;
  if (spec.name == "cifar10" || spec.name == "cifar10_gray") return SourceFormat::cifar;
  throw ConfigError("cannot infer source format of " + path.string() + " for dataset " + spec.name);
}

/// Brings a decoded sample to the dataset geometry: channel conversion, then
/// zero-padding when smaller (28x28 MNIST to 32x32), or center-crop and
/// bilinear resampling when larger.
inline Image conform(const Image& img, const DatasetSpec& spec) {
  Image out = io::match_channels(img, spec.channels);
  if (out.width() == spec.width && out.height() == spec.height) return out;
  if (out.width() <= spec.width && out.height() <= spec.height) return pad_to(out, spec.width, spec.height);
  if (out.width() != out.height()) out = crop_center_square(out);
  return resize_bilinear(out, spec.width, spec.height);
}

/// Loads up to `limit` samples of a dataset and conforms them to `spec`.
inline LoadedDataset load_dataset(const DatasetSpec& spec, const std::filesystem::path& path,
                                  std::optional<std::size_t> limit = std::nullopt,
                                  SourceFormat format = SourceFormat::automatic) {
  if (!std::filesystem::exists(path)) throw EmptyDatasetError("dataset path " + path.string() + " does not exist");
  LoadedDataset out{spec, {}, {}};
  std::vector<Image> raw;
  switch (resolve_format(spec, path, format)) {
    case SourceFormat::idx: raw = io::load_idx(path); break;
    case SourceFormat::cifar: raw = io::load_cifar_binary(path); break;
    default: {
      auto folder = io::load_image_folder_raw(path);
      raw = std::move(folder.images);
      out.failures = std::move(folder.failures);
    }
  }
  if (limit && raw.size() > *limit) raw.resize(*limit);
  out.images.reserve(raw.size());
  for (const auto& img : raw) out.images.push_back(conform(img, spec));
  if (out.images.empty()) throw EmptyDatasetError("dataset " + spec.name + " at " + path.string() + " is empty");
  return out;
}

inline std::string sha256_hex(const std::vector<std::uint8_t>& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 computation failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

struct PrepareOptions {
  DatasetSpec spec;
  std::filesystem::path source;
  std::filesystem::path target;
  SourceFormat format = SourceFormat::automatic;
  bool grayscale = false;
  std::optional<PatchConfig> patches;
  std::optional<std::size_t> limit;
};

struct PrepareReport {
  std::size_t written = 0;
  std::vector<io::FileFailure> failures;
  std::filesystem::path manifest;
};

inline constexpr const char* kManifestName = "MANIFEST.sha256";

/// Decodes the source, converts to grayscale if requested, conforms each sample
/// to the dataset geometry (or cuts it into patches of the dataset size), and
/// writes numbered PNGs plus a manifest in `sha256sum` format.
inline PrepareReport prepare_dataset(const PrepareOptions& opt) {
  DatasetSpec spec = opt.spec;
  if (opt.grayscale) spec.channels = 1;

  std::vector<Image> raw;
  PrepareReport report;
  switch (resolve_format(spec, opt.source, opt.format)) {
    case SourceFormat::idx: raw = io::load_idx(opt.source); break;
    case SourceFormat::cifar: raw = io::load_cifar_binary(opt.source); break;
    default: {
      auto folder = io::load_image_folder_raw(opt.source);
      raw = std::move(folder.images);
      report.failures = std::move(folder.failures);
    }
  }

  std::vector<Image> samples;
  for (const auto& img : raw) {
    if (opt.limit && samples.size() >= *opt.limit) break;
    if (opt.patches) {
      PatchConfig pc = *opt.patches;
      pc.patch_size = spec.width;
      const Image gray_or_rgb = io::match_channels(img, spec.channels);
      if (std::min(gray_or_rgb.width(), gray_or_rgb.height()) < pc.patch_size) continue;
      for (auto& p : extract_patches(gray_or_rgb, pc)) {
        if (opt.limit && samples.size() >= *opt.limit) break;
        samples.push_back(std::move(p));
      }
    } else {
      samples.push_back(conform(img, spec));
    }
  }
  if (samples.empty()) throw EmptyDatasetError("preparing " + opt.source.string() + " produced no samples");

  std::filesystem::create_directories(opt.target);
  report.manifest = opt.target / kManifestName;
  std::ofstream manifest(report.manifest, std::ios::trunc);
  if (!manifest) throw FormatError("cannot write " + report.manifest.string());
  char name[32];
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::snprintf(name, sizeof name, "%06zu.png", i);
    const auto bytes = io::encode_png(samples[i]);
    io::write_file(opt.target / name, bytes);
    manifest << sha256_hex(bytes) << "  " << name << '\n';
  }
  report.written = samples.size();
  return report;
}

}  // namespace csbench::bench
