#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "csbench/bench/benchmark.hpp"
#include "csbench/bench/datasets.hpp"
#include "csbench/bench/measurement_file.hpp"
#include "csbench/bench/run_config.hpp"
#include "csbench/error.hpp"
#include "csbench/io/image_file.hpp"
#include "csbench/metrics.hpp"
#include "csbench/scoring.hpp"
#include "csbench/solvers/reconstruct.hpp"

namespace csbench::bench {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitPartial = 3 };

/// Configuration and registry problems are usage errors; everything that comes
/// from reading or processing data is a data error.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const RegistryError*>(&e) ||
      dynamic_cast<const UnsupportedMethodError*>(&e))
    return kExitUsage;
  return kExitData;
}

// ---- sense -----------------------------------------------------------------

struct SenseOptions {
  RunConfig config;
  std::filesystem::path image;
  std::filesystem::path output;
};

/// Senses one image with the configured operator. The compression ratio is
/// the first entry of `ratios` unless `m` is given explicitly.
inline MeasurementFile cmd_sense(const SenseOptions& opt) {
  const RunConfig& cfg = opt.config;
  cfg.validate();
  const MatrixKind kind = parse_matrix_kind(cfg.sensing);
  const Image img = io::read_image(opt.image);
  const std::size_t expected = cfg.signal_length();
  const std::size_t actual = img.plane_size();
  if (img.width() != cfg.input_width || img.height() != cfg.input_height)
    throw ConfigError("image " + opt.image.string() + " is " + std::to_string(img.width()) + "x" +
                      std::to_string(img.height()) + " (n=" + std::to_string(actual) + ") but the config expects " +
                      std::to_string(cfg.input_width) + "x" + std::to_string(cfg.input_height) +
                      " (n=" + std::to_string(expected) + ")");
  if (img.channels() != cfg.input_channel)
    throw ConfigError("image " + opt.image.string() + " has " + std::to_string(img.channels()) +
                      " channels but input_channel=" + std::to_string(cfg.input_channel));

  const std::size_t m = cfg.measurements(cfg.ratios.front());
  MeasurementFile f;
  f.seed = cfg.seed;
  f.kind = kind;
  const SensingMatrix a = build_matrix(f.seed, m, expected, kind);
  f.group = sense_image(img, a, static_cast<double>(expected) / static_cast<double>(m));
  save_measurements(opt.output, f);
  return f;
}

// ---- reconstruct -----------------------------------------------------------

struct ReconstructOptions {
  RunConfig config;
  std::filesystem::path measurements;
  std::filesystem::path output;
  std::optional<std::filesystem::path> truth;
};

struct ReconstructReport {
  ReconstructionResult result;
  std::optional<double> psnr;
  std::optional<double> ssim;
  std::optional<std::filesystem::path> diagnostics;
};

inline std::filesystem::path diagnostics_path(const std::filesystem::path& output) {
  std::filesystem::path p = output;
  p.replace_extension(".diagnostics.csv");
  return p;
}

inline void write_diagnostics(std::ostream& out, const std::vector<SolverDiagnostics>& per_channel) {
  out << "channel,iteration,objective,residual,sigma,primal_residual\n";
  auto cell = [](const std::vector<double>& v, std::size_t i) {
    return i < v.size() ? csbench::detail::format_double(v[i]) : std::string();
  };
  for (std::size_t c = 0; c < per_channel.size(); ++c) {
    const auto& d = per_channel[c];
    const std::size_t rows =
        std::max({d.objective.size(), d.residual.size(), d.sigma.size(), d.primal_residual.size()});
    for (std::size_t i = 0; i < rows; ++i)
      out << c << ',' << i + 1 << ',' << cell(d.objective, i) << ',' << cell(d.residual, i) << ','
          << cell(d.sigma, i) << ',' << cell(d.primal_residual, i) << '\n';
  }
}

/// Rebuilds the operator from the file header, reconstructs with the configured
/// method and writes the image. With a ground truth, PSNR and SSIM go to `out`.
inline ReconstructReport cmd_reconstruct(const ReconstructOptions& opt, std::ostream& out) {
  const RunConfig& cfg = opt.config;
  const SolverConfig solver = cfg.solver_config(cfg.reconstruction);
  if (cfg.reconstruction != kBaselineMethod) (void)require_method(cfg.reconstruction);

  const MeasurementFile f = load_measurements(opt.measurements);
  const SensingMatrix a = f.rebuild_matrix();
  ReconstructReport report;
  report.result = reconstruct(cfg.reconstruction, f.group, a, solver);
  io::write_image(opt.output, report.result.image);

  out << "method " << cfg.reconstruction << ", " << report.result.iterations_used << " iterations, residual "
      << report.result.final_residual << '\n';
  if (opt.truth) {
    const Image truth = io::read_image(*opt.truth);
    report.psnr = psnr(truth, report.result.image);
    report.ssim = ssim(truth, report.result.image);
    out << std::fixed << std::setprecision(4) << "PSNR " << *report.psnr << " dB\nSSIM " << *report.ssim << '\n';
    out.unsetf(std::ios::fixed);
  }
  if (cfg.verbose) {
    report.diagnostics = diagnostics_path(opt.output);
    std::ofstream d(*report.diagnostics, std::ios::trunc);
    if (!d) throw FormatError("cannot write " + report.diagnostics->string());
    write_diagnostics(d, report.result.diagnostics);
  }
  return report;
}

// ---- benchmark -------------------------------------------------------------

struct DatasetSource {
  std::string name;
  std::filesystem::path path;
};

/// Parses "name=path"; a bare name resolves to `<root>/<name>`.
inline DatasetSource parse_dataset_source(const std::string& text, const std::filesystem::path& root = "data") {
  const auto eq = text.find('=');
  if (eq == std::string::npos) return {text, root / text};
  return {text.substr(0, eq), text.substr(eq + 1)};
}

struct BenchmarkOptions {
  RunConfig config;
  std::vector<std::string> methods;
  std::vector<DatasetSource> datasets;
};

struct BenchmarkOutcome {
  RunRecord record;
  std::vector<io::FileFailure> load_failures;
  int exit_code = kExitOk;
};

inline BenchmarkOutcome cmd_benchmark(const BenchmarkOptions& opt, std::ostream* log = nullptr) {
  opt.config.validate();
  if (opt.datasets.empty()) throw ConfigError("benchmark needs at least one dataset");
  std::vector<std::string> methods = opt.methods;
  if (methods.empty()) methods.push_back(opt.config.reconstruction);

  BenchmarkOutcome outcome;
  std::vector<LoadedDataset> loaded;
  for (const auto& src : opt.datasets) {
    const auto spec = find_dataset(src.name);
    if (!spec) throw ConfigError("unknown dataset '" + src.name + "'");
    loaded.push_back(load_dataset(*spec, src.path, opt.config.limit));
    for (auto& f : loaded.back().failures) outcome.load_failures.push_back(std::move(f));
  }

  outcome.record = run_benchmark(opt.config, methods, loaded, log);
  write_run_outputs(outcome.record, opt.config.output_dir);
  if (outcome.record.partial_failure()) {
    outcome.exit_code = kExitPartial;
    if (log)
      *log << outcome.record.failures.size() << " of " << outcome.record.attempted()
           << " reconstructions failed; see " << (opt.config.output_dir / kRunRecordName).string() << '\n';
  }
  return outcome;
}

// ---- score -----------------------------------------------------------------

struct ScoreOptions {
  std::vector<std::filesystem::path> inputs;
  std::optional<std::filesystem::path> weights;
  std::filesystem::path output_dir = ".";
  bool verbose = false;
};

inline constexpr const char* kScoresName = "scores.csv";
inline constexpr const char* kHistogramName = "histogram.csv";
inline constexpr const char* kBreakdownName = "score_breakdown.csv";

/// Scores every table found in the inputs, writes scores.csv and
/// histogram.csv (plus score_breakdown.csv when verbose), and prints the
/// ranking to `out`. Returns the scores in ranking order.
inline std::vector<BenchmarkScore> cmd_score(const ScoreOptions& opt, std::ostream& out) {
  if (opt.inputs.empty()) throw ConfigError("score needs at least one raw result CSV");
  const WeightScheme weights = opt.weights ? load_weights(*opt.weights) : WeightScheme::defaults();

  std::vector<BenchmarkScore> scores;
  for (const auto& path : opt.inputs) {
    for (const auto& table : parse_raw_csv(path)) {
      const bool duplicate = std::any_of(scores.begin(), scores.end(),
                                         [&](const BenchmarkScore& s) { return s.method == table.method; });
      if (duplicate) throw ParseError(path.string() + ": method '" + table.method + "' appears in more than one input");
      scores.push_back(compute_score(table, weights));
    }
  }
  scores = rank_methods(std::move(scores));

  std::filesystem::create_directories(opt.output_dir);
  auto open = [&](const char* name) {
    std::ofstream f(opt.output_dir / name, std::ios::trunc);
    if (!f) throw FormatError("cannot write " + (opt.output_dir / name).string());
    return f;
  };
  {
    auto f = open(kScoresName);
    write_score_report(f, scores);
  }
  {
    auto f = open(kHistogramName);
    write_histogram(f, scores);
  }
  if (opt.verbose) {
    auto f = open(kBreakdownName);
    write_score_terms(f, scores);
  }

  char line[160];
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto& s = scores[i];
    std::snprintf(line, sizeof line, "%2zu. %-12s total %7.2f  (speed %6.2f, accuracy %6.2f)\n", i + 1,
                  s.method.c_str(), s.total, s.speed_score, s.accuracy_score);
    out << line;
  }
  return scores;
}

// ---- datasets prepare ------------------------------------------------------

inline PrepareReport cmd_datasets_prepare(const PrepareOptions& opt, std::ostream* log = nullptr) {
  PrepareReport report = prepare_dataset(opt);
  if (log) {
    *log << "wrote " << report.written << " images to " << opt.target.string() << '\n';
    for (const auto& f : report.failures) *log << "skipped " << f.path.string() << ": " << f.message << '\n';
  }
  return report;
}

}  // namespace csbench::bench
