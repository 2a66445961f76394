#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "csbench/error.hpp"
#include "csbench/image.hpp"
#include "csbench/scoring.hpp"
#include "csbench/sensing.hpp"
#include "csbench/solvers/reconstruct.hpp"

namespace csbench::bench {

/// Run parameters of the command-line front end. Key names follow the unified
/// method interface: sensing, reconstruction, stage, default, dataset,
/// input_channel, input_width, input_height, m, n, specifics.
struct RunConfig {
  std::string sensing = "gaussian_orthonormal_rows";
  std::string reconstruction = "tval3";
  std::string stage = "testing";
  bool use_defaults = false;
  std::string dataset = "mnist";
  int input_channel = 1;
  int input_width = 32;
  int input_height = 32;
  std::size_t m = 0;  // 0: derived from the first ratio
  std::size_t n = 0;  // 0: input_width * input_height
  Specifics specifics;
  std::uint64_t seed = 0;
  std::vector<int> ratios{2, 4, 8, 16, 32};
  std::filesystem::path output_dir = "csbench-out";
  std::optional<std::size_t> limit;
  bool verbose = false;

  std::size_t signal_length() const { return n ? n : static_cast<std::size_t>(input_width) * input_height; }

  /// Measurement count for `ratio`, or the explicit m.
  std::size_t measurements(int ratio) const { return m ? m : ratio_to_m(signal_length(), ratio); }

  /// Sets width/height/channels from a built-in dataset.
  void apply_dataset(const DatasetSpec& spec) {
    dataset = spec.name;
    input_channel = spec.channels;
    input_width = spec.width;
    input_height = spec.height;
  }

  void validate() const {
    if (input_channel != 1 && input_channel != 3) throw ConfigError("input_channel must be 1 or 3");
    if (input_width < 1 || input_height < 1) throw ConfigError("input_width and input_height must be positive");
    const std::size_t pixels = static_cast<std::size_t>(input_width) * input_height;
    if (n && n != pixels)
      throw ConfigError("n=" + std::to_string(n) + " but input_width x input_height = " + std::to_string(pixels));
    if (m > signal_length()) throw ConfigError("m=" + std::to_string(m) + " exceeds n=" + std::to_string(signal_length()));
    if (stage != "testing" && stage != "training") throw ConfigError("stage must be testing or training");
    if (ratios.empty()) throw ConfigError("at least one compression ratio is required");
    for (int r : ratios)
      if (std::find(kRatios.begin(), kRatios.end(), r) == kRatios.end())
        throw ConfigError("ratio " + std::to_string(r) + " is not one of 2, 4, 8, 16, 32");
    if (m && ratios.size() == 1 && ratio_to_m(signal_length(), ratios.front()) != m)
      throw ConfigError("m=" + std::to_string(m) + " is inconsistent with ratio " + std::to_string(ratios.front()));
    (void)parse_matrix_kind(sensing);
  }

  /// Solver configuration for `method`. With use_defaults set, the method
  /// defaults win and user specifics are ignored.
  SolverConfig solver_config(std::string_view method) const {
    if (stage == "training")
      throw ConfigError("stage=training is not available: model-based methods have no training stage");
    SolverConfig cfg = default_config(method);
    if (use_defaults) return cfg;
    for (const auto& [key, value] : specifics.values()) {
      if (key == "max_iterations") cfg.max_iterations = static_cast<int>(specifics.get_int(key, cfg.max_iterations));
      else if (key == "tolerance") cfg.tolerance = specifics.get_double(key, cfg.tolerance);
      else cfg.specifics.set(key, value);
    }
    cfg.validate();
    return cfg;
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"sensing", sensing},
                     {"reconstruction", reconstruction},
                     {"stage", stage},
                     {"default", use_defaults},
                     {"dataset", dataset},
                     {"input_channel", input_channel},
                     {"input_width", input_width},
                     {"input_height", input_height},
                     {"m", m},
                     {"n", signal_length()},
                     {"seed", seed},
                     {"ratios", ratios},
                     {"output_dir", output_dir.string()},
                     {"specifics", specifics.values()}};
    j["limit"] = limit ? nlohmann::json(*limit) : nlohmann::json(nullptr);
    return j;
  }
};

namespace detail {

inline bool parse_bool(const std::string& v, const std::string& where) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(where + ": expected a boolean, got '" + v + "'");
}

template <class Int>
Int parse_uint(const std::string& v, const std::string& where) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ConfigError(where + ": expected an integer, got '" + v + "'");
  return out;
}

inline std::vector<int> parse_ratio_list(const std::string& v, const std::string& where) {
  std::vector<int> out;
  for (const auto& part : csbench::detail::split(v, ',')) {
    if (!part.empty()) out.push_back(parse_uint<int>(part, where));
  }
  return out;
}

}  // namespace detail

/// Applies one `key = value` assignment from a config file or the command line.
inline void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value,
                             const std::string& where = "config") {
  const std::string at = where + " '" + key + "'";
  if (key == "sensing") cfg.sensing = value;
  else if (key == "reconstruction") cfg.reconstruction = value;
  else if (key == "stage") cfg.stage = value;
  else if (key == "default") cfg.use_defaults = detail::parse_bool(value, at);
  else if (key == "dataset") {
    cfg.dataset = value;
    if (const auto spec = find_dataset(value)) cfg.apply_dataset(*spec);
  } else if (key == "input_channel") cfg.input_channel = detail::parse_uint<int>(value, at);
  else if (key == "input_width") cfg.input_width = detail::parse_uint<int>(value, at);
  else if (key == "input_height") cfg.input_height = detail::parse_uint<int>(value, at);
  else if (key == "m") cfg.m = detail::parse_uint<std::size_t>(value, at);
  else if (key == "n") cfg.n = detail::parse_uint<std::size_t>(value, at);
  else if (key == "seed") cfg.seed = detail::parse_uint<std::uint64_t>(value, at);
  else if (key == "ratios" || key == "ratio") cfg.ratios = detail::parse_ratio_list(value, at);
  else if (key == "output_dir") cfg.output_dir = value;
  else if (key == "limit") cfg.limit = detail::parse_uint<std::size_t>(value, at);
  else if (key == "verbose") cfg.verbose = detail::parse_bool(value, at);
  else throw ConfigError(where + ": unknown key '" + key + "'");
}

/// Flat `key = value` lines; a `[specifics]` section collects solver
/// parameters. '#' starts a comment.
inline RunConfig parse_run_config(std::istream& in, const std::string& source = "<config>", RunConfig cfg = {}) {
  std::string line;
  std::size_t row = 0;
  bool in_specifics = false;
  while (std::getline(in, line)) {
    ++row;
    const std::string where = source + ":" + std::to_string(row);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = csbench::detail::trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t != "[specifics]") throw ConfigError(where + ": unknown section " + t);
      in_specifics = true;
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = csbench::detail::trim(std::string_view(t).substr(0, eq));
    const std::string value = csbench::detail::trim(std::string_view(t).substr(eq + 1));
    if (in_specifics) cfg.specifics.set(key, value);
    else set_config_value(cfg, key, value, where);
  }
  return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_run_config(in, path.string(), std::move(base));
}

}  // namespace csbench::bench
