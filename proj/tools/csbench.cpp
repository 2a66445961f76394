// csbench: sense, reconstruct, benchmark and score compressive sensing methods.
//
//   csbench sense img.pgm -o img.csm --ratio 4
//   csbench reconstruct img.csm -o rec.png --method tval3 --truth img.pgm
//   csbench benchmark --method tval3 --dataset mnist=data/mnist --limit 100 --out run1
//   csbench score tables/*.csv --out report
//   csbench datasets prepare mnist t10k-images-idx3-ubyte data/mnist

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "csbench/bench/commands.hpp"
#include "csbench/version.hpp"

namespace {

using namespace csbench;
using namespace csbench::bench;

struct GlobalFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  bool use_defaults = false;
  std::optional<std::size_t> limit;
  std::string out;
  std::string weights;
  bool verbose = false;
  std::vector<std::string> assignments;
};

// Shared run options; empty/unset means "keep the config file value".
struct RunFlags {
  std::string method;
  std::string sensing;
  std::string dataset;
  std::string ratios;
  std::optional<int> width;
  std::optional<int> height;
  std::optional<int> channels;
  std::optional<std::size_t> m;
  std::string stage;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool with_method) {
  if (with_method) cmd->add_option("--method,--reconstruction", f.method, "reconstruction method (l1, tval3, damp, pinv)");
  cmd->add_option("--sensing", f.sensing, "gaussian, gaussian_orthonormal_rows or identity");
  cmd->add_option("--ratio,--ratios", f.ratios, "compression ratio(s), comma separated");
  cmd->add_option("--input-width", f.width);
  cmd->add_option("--input-height", f.height);
  cmd->add_option("--input-channel", f.channels);
  cmd->add_option("-m", f.m, "explicit measurement count");
  cmd->add_option("--stage", f.stage, "testing (model-based methods have no training stage)");
}

RunConfig build_config(const GlobalFlags& g, const RunFlags& f, const std::string& dataset = {}) {
  RunConfig cfg;
  if (!g.config.empty()) cfg = load_run_config(g.config);
  auto set = [&](const char* key, const std::string& value) { set_config_value(cfg, key, value, "command line"); };
  if (!dataset.empty()) set("dataset", dataset);
  if (!f.method.empty()) set("reconstruction", f.method);
  if (!f.sensing.empty()) set("sensing", f.sensing);
  if (!f.ratios.empty()) set("ratios", f.ratios);
  if (f.width) set("input_width", std::to_string(*f.width));
  if (f.height) set("input_height", std::to_string(*f.height));
  if (f.channels) set("input_channel", std::to_string(*f.channels));
  if (f.m) set("m", std::to_string(*f.m));
  if (!f.stage.empty()) set("stage", f.stage);
  for (const auto& a : g.assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + a + "'");
    cfg.specifics.set(a.substr(0, eq), a.substr(eq + 1));
  }
  if (g.seed) cfg.seed = *g.seed;
  if (g.use_defaults) cfg.use_defaults = true;
  if (g.limit) cfg.limit = *g.limit;
  if (!g.out.empty()) cfg.output_dir = g.out;
  if (g.verbose) cfg.verbose = true;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark compressive sensing reconstruction methods"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--config", g.config, "run configuration file (key = value, [specifics] section)");
  app.add_option("--seed", g.seed, "master seed for sensing matrices");
  app.add_flag("--default", g.use_defaults, "use method defaults; overrides specifics");
  app.add_option("--limit", g.limit, "maximum number of samples per dataset");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--weights", g.weights, "weights file for scoring");
  app.add_flag("--verbose,-v", g.verbose);
  app.add_option("--set", g.assignments, "solver specific parameter, key=value (repeatable)");

  RunFlags sense_flags;
  std::string sense_image, sense_output, sense_dataset;
  auto* sense = app.add_subcommand("sense", "measure one image and write a measurement file");
  sense->add_option("image", sense_image)->required();
  sense->add_option("-o,--output", sense_output)->required();
  sense->add_option("--dataset", sense_dataset, "take width, height and channels from a built-in dataset");
  add_run_flags(sense, sense_flags, false);

  RunFlags rec_flags;
  std::string rec_input, rec_output, rec_truth;
  auto* rec = app.add_subcommand("reconstruct", "recover an image from a measurement file");
  rec->add_option("measurements", rec_input)->required();
  rec->add_option("-o,--output", rec_output)->required();
  rec->add_option("--truth", rec_truth, "ground-truth image; prints PSNR and SSIM");
  add_run_flags(rec, rec_flags, true);

  RunFlags bench_flags;
  std::vector<std::string> bench_methods, bench_datasets;
  std::string bench_root = "data";
  auto* bench = app.add_subcommand("benchmark", "run methods over datasets and ratios");
  bench->add_option("--method", bench_methods, "method to run (repeatable)");
  bench->add_option("--dataset", bench_datasets, "dataset as name or name=path (repeatable)")->required();
  bench->add_option("--data-root", bench_root, "directory holding prepared datasets");
  add_run_flags(bench, bench_flags, false);

  std::vector<std::string> score_inputs;
  auto* score = app.add_subcommand("score", "score raw result tables and rank methods");
  score->add_option("raw", score_inputs, "raw result CSV files");

  auto* datasets = app.add_subcommand("datasets", "dataset utilities");
  datasets->require_subcommand(1);
  std::string prep_dataset, prep_source, prep_target, prep_format = "auto";
  bool prep_gray = false, prep_augment = false;
  std::optional<int> prep_stride;
  bool prep_patches = false;
  auto* prepare = datasets->add_subcommand("prepare", "decode and normalize a dataset into numbered PNGs");
  prepare->add_option("dataset", prep_dataset, "built-in dataset name")->required();
  prepare->add_option("source", prep_source, "IDX file, CIFAR-10 batch or image folder")->required();
  prepare->add_option("target", prep_target, "output directory")->required();
  prepare->add_option("--format", prep_format, "auto, idx, cifar or folder");
  prepare->add_flag("--gray", prep_gray, "convert to a single channel");
  prepare->add_flag("--patches", prep_patches, "cut dataset-sized patches instead of resizing");
  prepare->add_option("--stride", prep_stride, "patch stride (default: patch size)");
  prepare->add_flag("--augment", prep_augment, "add rotations and flips of every patch");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sense) {
      SenseOptions opt{build_config(g, sense_flags, sense_dataset), sense_image, sense_output};
      const auto f = cmd_sense(opt);
      std::cout << "wrote " << f.group.per_channel.size() << " x " << f.group.m << " measurements to "
                << sense_output << '\n';
    } else if (*rec) {
      ReconstructOptions opt{build_config(g, rec_flags), rec_input, rec_output, std::nullopt};
      if (!rec_truth.empty()) opt.truth = rec_truth;
      cmd_reconstruct(opt, std::cout);
    } else if (*bench) {
      BenchmarkOptions opt{build_config(g, bench_flags), bench_methods, {}};
      for (const auto& d : bench_datasets) opt.datasets.push_back(parse_dataset_source(d, bench_root));
      const auto outcome = cmd_benchmark(opt, &std::cerr);
      for (const auto& f : outcome.load_failures)
        std::cerr << "skipped " << f.path.string() << ": " << f.message << '\n';
      std::cout << "wrote " << (opt.config.output_dir / kRawResultsName).string() << " and "
                << (opt.config.output_dir / kRunRecordName).string() << '\n';
      return outcome.exit_code;
    } else if (*score) {
      ScoreOptions opt;
      for (const auto& p : score_inputs) opt.inputs.emplace_back(p);
      if (!g.weights.empty()) opt.weights = g.weights;
      opt.output_dir = g.out.empty() ? "." : g.out;
      opt.verbose = g.verbose;
      cmd_score(opt, std::cout);
    } else if (*prepare) {
      const auto spec = find_dataset(prep_dataset);
      if (!spec) throw ConfigError("unknown dataset '" + prep_dataset + "'");
      PrepareOptions opt;
      opt.spec = *spec;
      opt.source = prep_source;
      opt.target = prep_target;
      opt.format = parse_source_format(prep_format);
      opt.grayscale = prep_gray;
      opt.limit = g.limit;
      if (prep_patches) opt.patches = PatchConfig{spec->width, prep_stride.value_or(spec->width), prep_augment};
      const auto report = cmd_datasets_prepare(opt, &std::cerr);
      if (report.failures.size() * 100 > report.written + report.failures.size()) return kExitPartial;
    }
  } catch (const std::exception& e) {
    std::cerr << "csbench: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kExitOk;
}
