#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "csbench/bench/datasets.hpp"
#include "csbench/bench/run_config.hpp"
#include "csbench/error.hpp"
#include "csbench/metrics.hpp"
#include "csbench/random.hpp"
#include "csbench/scoring.hpp"
#include "csbench/sensing.hpp"
#include "csbench/solvers/reconstruct.hpp"
#include "csbench/version.hpp"

namespace csbench::bench {

/// Seed of the sensing matrix used for every image of one (dataset, ratio) pair.
inline std::uint64_t matrix_seed(std::uint64_t master, std::string_view dataset, int ratio) {
  return hash_seed(std::to_string(master) + ":" + std::string(dataset) + ":" + std::to_string(ratio));
}

struct ImageRow {
  std::string method;
  std::string dataset;
  int ratio = 0;
  std::size_t index = 0;
  double psnr = 0.0;
  double ssim = 0.0;
  double seconds = 0.0;
  int iterations = 0;
};

struct ImageFailure {
  std::string method;
  std::string dataset;
  int ratio = 0;
  std::size_t index = 0;
  std::string message;
};

struct CellSummary {
  std::string method;
  std::string dataset;
  int ratio = 0;
  MetricTriple mean;
  std::size_t images = 0;
  std::size_t failed = 0;
};

struct RunRecord {
  RunConfig config;
  std::vector<std::string> methods;
  std::vector<ImageRow> rows;
  std::vector<CellSummary> cells;
  std::vector<ImageFailure> failures;
  std::string started;
  std::string finished;

  std::size_t attempted() const { return rows.size() + failures.size(); }

  /// More than 1% of attempted reconstructions failed.
  bool partial_failure() const { return attempted() > 0 && failures.size() * 100 > attempted(); }

  /// One table per method holding the cells that produced at least one image.
  std::vector<RawResultTable> raw_tables() const {
    std::vector<RawResultTable> tables;
    for (const auto& method : methods) {
      RawResultTable t{method, {}};
      for (const auto& c : cells)
        if (c.method == method && c.images > 0) t.cells.push_back({c.dataset, c.ratio, c.mean.psnr, c.mean.ssim, c.mean.speed});
      tables.push_back(std::move(t));
    }
    return tables;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["version"] = std::string(kVersion);
    j["started"] = started;
    j["finished"] = finished;
    j["config"] = config.to_json();
    j["methods"] = methods;
    auto& cj = j["cells"] = nlohmann::json::array();
    for (const auto& c : cells)
      cj.push_back({{"method", c.method}, {"dataset", c.dataset}, {"ratio", c.ratio}, {"psnr", c.mean.psnr},
                    {"ssim", c.mean.ssim}, {"speed", c.mean.speed}, {"images", c.images}, {"failed", c.failed}});
    auto& rj = j["images"] = nlohmann::json::array();
    for (const auto& r : rows)
      rj.push_back({{"method", r.method}, {"dataset", r.dataset}, {"ratio", r.ratio}, {"index", r.index},
                    {"psnr", r.psnr}, {"ssim", r.ssim}, {"seconds", r.seconds}, {"iterations", r.iterations}});
    auto& fj = j["failures"] = nlohmann::json::array();
    for (const auto& f : failures)
      fj.push_back({{"method", f.method}, {"dataset", f.dataset}, {"ratio", f.ratio}, {"index", f.index},
                    {"message", f.message}});
    return j;
  }
};

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Runs every (method, dataset, ratio) combination. Per pair, one seeded matrix
/// senses all images before any timing starts; each method then reconstructs
/// the images one after another under the throughput clock while holding the
/// global timing lock. Metrics are computed after the clock stops. A solver
/// error skips the image and is recorded.
inline RunRecord run_benchmark(const RunConfig& cfg, const std::vector<std::string>& methods,
                               const std::vector<LoadedDataset>& datasets, std::ostream* log = nullptr) {
  if (methods.empty()) throw ConfigError("no methods to benchmark");
  if (datasets.empty()) throw ConfigError("no datasets to benchmark");
  const MatrixKind kind = parse_matrix_kind(cfg.sensing);

  std::vector<SolverConfig> solver_configs;
  for (const auto& method : methods) {
    if (method != kBaselineMethod) {
      const auto desc = require_method(method);
      if (!desc.executable)
        throw UnsupportedMethodError("method '" + std::string(desc.display_name) +
                                     "' cannot be benchmarked here; score its raw results instead");
    }
    solver_configs.push_back(cfg.solver_config(method));
  }

  RunRecord record;
  record.config = cfg;
  record.methods = methods;
  record.started = utc_timestamp();

  for (const auto& data : datasets) {
    const Shape shape{data.spec.height, data.spec.width};
    for (int ratio : cfg.ratios) {
      const std::size_t n = shape.size();
      const SensingMatrix a = build_matrix(matrix_seed(cfg.seed, data.spec.name, ratio), ratio_to_m(n, ratio), n, kind);
      std::vector<MeasurementGroup> measured;
      measured.reserve(data.images.size());
      for (const auto& img : data.images) measured.push_back(sense_image(img, a, ratio));

      for (std::size_t k = 0; k < methods.size(); ++k) {
        const std::string& method = methods[k];
        std::vector<Image> outputs(measured.size());
        std::vector<int> iterations(measured.size(), 0);
        std::vector<double> seconds(measured.size(), 0.0);
        std::vector<bool> ok(measured.size(), false);
        ThroughputClock clock;
        {
          std::lock_guard lock(timing_mutex());
          for (std::size_t i = 0; i < measured.size(); ++i) {
            const double before = clock.elapsed();
            std::string failure;
            {
              auto section = clock.time_one();
              try {
                auto result = reconstruct(method, measured[i], a, solver_configs[k]);
                outputs[i] = std::move(result.image);
                iterations[i] = result.iterations_used;
                ok[i] = true;
              } catch (const Error& e) {
                section.cancel();
                failure = e.what();
              }
            }
            seconds[i] = clock.elapsed() - before;
            if (!ok[i]) record.failures.push_back({method, data.spec.name, ratio, i, failure});
          }
        }

        CellSummary cell{method, data.spec.name, ratio, {}, 0, 0};
        double psnr_sum = 0.0;
        double ssim_sum = 0.0;
        for (std::size_t i = 0; i < measured.size(); ++i) {
          if (!ok[i]) {
            ++cell.failed;
            continue;
          }
          ImageRow row{method, data.spec.name, ratio, i, psnr(data.images[i], outputs[i]),
                       ssim(data.images[i], outputs[i]), seconds[i], iterations[i]};
          psnr_sum += row.psnr;
          ssim_sum += row.ssim;
          ++cell.images;
          record.rows.push_back(std::move(row));
        }
        if (cell.images > 0) {
          cell.mean.psnr = psnr_sum / static_cast<double>(cell.images);
          cell.mean.ssim = ssim_sum / static_cast<double>(cell.images);
          cell.mean.speed = clock.speed();
        }
        if (log)
          *log << method << ' ' << data.spec.name << " ratio " << ratio << ": psnr " << cell.mean.psnr << " ssim "
               << cell.mean.ssim << " speed " << cell.mean.speed << " img/s (" << cell.images << " ok, "
               << cell.failed << " failed)\n";
        record.cells.push_back(std::move(cell));
      }
    }
  }
  record.finished = utc_timestamp();
  return record;
}

inline constexpr const char* kRawResultsName = "raw_results.csv";
inline constexpr const char* kRunRecordName = "run_record.json";

/// Writes raw_results.csv and run_record.json into `dir`.
inline void write_run_outputs(const RunRecord& record, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / kRawResultsName, std::ios::trunc);
    if (!out) throw FormatError("cannot write " + (dir / kRawResultsName).string());
    write_raw_csv(out, record.raw_tables());
  }
  std::ofstream out(dir / kRunRecordName, std::ios::trunc);
  if (!out) throw FormatError("cannot write " + (dir / kRunRecordName).string());
  out << record.to_json().dump(2) << '\n';
}

}  // namespace csbench::bench
