#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "csbench/bench/commands.hpp"
#include "csbench/io/idx.hpp"
#include "support.hpp"

using namespace csbench;
using namespace csbench::bench;
using csbench::testing::TempDir;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig mnist_config(const TempDir& dir) {
  RunConfig cfg;
  cfg.apply_dataset(*find_dataset("mnist"));
  cfg.output_dir = dir.path() / "out";
  return cfg;
}

}  // namespace

// ---- config ----------------------------------------------------------------

TEST(RunConfig, ParsesKeysAndSpecifics) {
  std::istringstream in(
      "# run\nreconstruction = damp\ndataset = cifar10\nseed = 7\nratios = 2, 8\ndefault = false\n"
      "[specifics]\nmax_iterations = 12\ndenoiser = median3\n");
  const RunConfig cfg = parse_run_config(in, "run.conf");
  EXPECT_EQ(cfg.reconstruction, "damp");
  EXPECT_EQ(cfg.input_channel, 3);
  EXPECT_EQ(cfg.input_width, 32);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.ratios, (std::vector<int>{2, 8}));
  const SolverConfig solver = cfg.solver_config("damp");
  EXPECT_EQ(solver.max_iterations, 12);
  EXPECT_EQ(solver.specifics.get_string("denoiser", ""), "median3");
}

TEST(RunConfig, RejectsInconsistentValues) {
  RunConfig cfg;
  cfg.ratios = {4};
  cfg.m = 300;  // 1024 / 4 = 256
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.m = 256;
  EXPECT_NO_THROW(cfg.validate());

  RunConfig wrong_n;
  wrong_n.n = 1000;
  EXPECT_THROW(wrong_n.validate(), ConfigError);

  RunConfig bad_ratio;
  bad_ratio.ratios = {3};
  EXPECT_THROW(bad_ratio.validate(), ConfigError);

  std::istringstream unknown("colour = red\n");
  EXPECT_THROW(parse_run_config(unknown), ConfigError);
  std::istringstream bad_int("seed = -1\n");
  EXPECT_THROW(parse_run_config(bad_int), ConfigError);
}

TEST(RunConfig, TrainingStageIsRejected) {
  RunConfig cfg;
  cfg.stage = "training";
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_THROW(cfg.solver_config("tval3"), ConfigError);
  cfg.stage = "deploy";
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(RunConfig, DefaultFlagIgnoresSpecifics) {
  RunConfig cfg;
  cfg.specifics.set("max_iterations", "3");
  EXPECT_EQ(cfg.solver_config("tval3").max_iterations, 3);
  cfg.use_defaults = true;
  EXPECT_EQ(cfg.solver_config("tval3").max_iterations, default_config("tval3").max_iterations);
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(ConfigError("x")), kExitUsage);
  EXPECT_EQ(exit_code_for(RegistryError("x")), kExitUsage);
  EXPECT_EQ(exit_code_for(UnsupportedMethodError("x")), kExitUsage);
  EXPECT_EQ(exit_code_for(FormatError("x")), kExitData);
  EXPECT_EQ(exit_code_for(CompletenessError("x")), kExitData);
  EXPECT_EQ(exit_code_for(std::runtime_error("x")), kExitData);
}

TEST(DatasetSource, NameAndPath) {
  const auto bare = parse_dataset_source("mnist", "root");
  EXPECT_EQ(bare.name, "mnist");
  EXPECT_EQ(bare.path, std::filesystem::path("root") / "mnist");
  const auto pair = parse_dataset_source("cifar10=/tmp/c.bin");
  EXPECT_EQ(pair.name, "cifar10");
  EXPECT_EQ(pair.path, "/tmp/c.bin");
}

// ---- measurement files -----------------------------------------------------

TEST(MeasurementFile, RoundTripAndCorruption) {
  std::mt19937_64 rng(1);
  const Image img = csbench::testing::random_image(rng, 3, 8, 8);
  MeasurementFile f;
  f.seed = 99;
  f.kind = MatrixKind::gaussian;
  f.group = sense_image(img, build_matrix(f.seed, 16, 64, f.kind), 4);

  const auto bytes = encode_measurements(f);
  EXPECT_EQ(bytes.size(), 4u + 4 + 16 + 16 + 8 + 8 + 3 * 16 * 8);
  const auto back = decode_measurements(bytes);
  EXPECT_EQ(back.seed, 99u);
  EXPECT_EQ(back.kind, MatrixKind::gaussian);
  EXPECT_EQ(back.group.ratio, 4.0);
  EXPECT_EQ(back.group.shape.height, 8);
  ASSERT_EQ(back.group.per_channel.size(), 3u);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(back.group.per_channel[c], f.group.per_channel[c]);
  EXPECT_EQ(back.rebuild_matrix().entries(), build_matrix(99, 16, 64, MatrixKind::gaussian).entries());

  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_THROW(decode_measurements(truncated), FormatError);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(decode_measurements(bad_magic), FormatError);
  auto bad_version = bytes;
  bad_version[4] = 9;
  EXPECT_THROW(decode_measurements(bad_version), FormatError);
}

// ---- sense / reconstruct ---------------------------------------------------

TEST(CmdSense, GrayscaleAtRatioFour) {
  TempDir dir("sense");
  io::write_image(dir / "digit.pgm", csbench::testing::mnist_digits()[0]);
  SenseOptions opt{mnist_config(dir), dir / "digit.pgm", dir / "digit.csm"};
  opt.config.ratios = {4};
  const auto f = cmd_sense(opt);
  ASSERT_EQ(f.group.per_channel.size(), 1u);
  EXPECT_EQ(f.group.per_channel[0].size(), 256);
  EXPECT_EQ(load_measurements(opt.output).group.per_channel[0], f.group.per_channel[0]);

  // same seed, same bytes
  opt.output = dir / "again.csm";
  cmd_sense(opt);
  EXPECT_EQ(slurp(dir / "digit.csm"), slurp(dir / "again.csm"));
}

TEST(CmdSense, DimensionMismatchNamesBothSizes) {
  TempDir dir("sense-bad");
  io::write_image(dir / "wide.pgm", Image::filled(1, 32, 40, 0.5));
  SenseOptions opt{mnist_config(dir), dir / "wide.pgm", dir / "x.csm"};
  try {
    cmd_sense(opt);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("1280"), std::string::npos) << msg;
    EXPECT_NE(msg.find("1024"), std::string::npos) << msg;
  }
  io::write_image(dir / "rgb.ppm", Image::filled(3, 32, 32, 0.5));
  opt.image = dir / "rgb.ppm";
  EXPECT_THROW(cmd_sense(opt), ConfigError);
}

TEST(CmdReconstruct, IdentityRoundTripIsExact) {
  TempDir dir("identity");
  const Image truth = csbench::testing::mnist_digits()[3];
  io::write_image(dir / "truth.png", truth);
  RunConfig cfg = mnist_config(dir);
  cfg.sensing = "identity";
  cfg.m = 1024;
  cfg.reconstruction = std::string(kBaselineMethod);
  cmd_sense({cfg, dir / "truth.png", dir / "y.csm"});

  std::ostringstream out;
  const auto report = cmd_reconstruct({cfg, dir / "y.csm", dir / "x.png", dir / "truth.png"}, out);
  ASSERT_TRUE(report.psnr.has_value());
  EXPECT_EQ(*report.psnr, 48.0);
  EXPECT_NEAR(*report.ssim, 1.0, 1e-12);
  EXPECT_NE(out.str().find("PSNR 48.0000 dB"), std::string::npos) << out.str();
  EXPECT_EQ(io::read_image(dir / "x.png").pixels().size(), truth.pixels().size());
}

TEST(CmdReconstruct, VerboseWritesDiagnostics) {
  TempDir dir("diag");
  io::write_image(dir / "truth.pgm", csbench::testing::mnist_digits()[1]);
  RunConfig cfg = mnist_config(dir);
  cfg.ratios = {2};
  cfg.verbose = true;
  cfg.specifics.set("max_iterations", "5");
  cmd_sense({cfg, dir / "truth.pgm", dir / "y.csm"});
  std::ostringstream out;
  const auto report = cmd_reconstruct({cfg, dir / "y.csm", dir / "x.pgm", std::nullopt}, out);
  ASSERT_TRUE(report.diagnostics.has_value());
  std::ifstream diag(*report.diagnostics);
  std::string line;
  std::getline(diag, line);
  EXPECT_EQ(line, "channel,iteration,objective,residual,sigma,primal_residual");
  int rows = 0;
  while (std::getline(diag, line)) ++rows;
  EXPECT_GT(rows, 0);
  EXPECT_FALSE(report.psnr.has_value());
}

TEST(CmdReconstruct, UnsupportedMethodsAndStages) {
  TempDir dir("unsupported");
  io::write_image(dir / "truth.pgm", csbench::testing::mnist_digits()[0]);
  RunConfig cfg = mnist_config(dir);
  cmd_sense({cfg, dir / "truth.pgm", dir / "y.csm"});
  std::ostringstream out;

  RunConfig learned = cfg;
  learned.reconstruction = "reconnet";
  EXPECT_THROW(cmd_reconstruct({learned, dir / "y.csm", dir / "x.pgm", std::nullopt}, out), UnsupportedMethodError);
  RunConfig unknown = cfg;
  unknown.reconstruction = "magic";
  EXPECT_THROW(cmd_reconstruct({unknown, dir / "y.csm", dir / "x.pgm", std::nullopt}, out), RegistryError);
  RunConfig training = cfg;
  training.stage = "training";
  EXPECT_THROW(cmd_reconstruct({training, dir / "y.csm", dir / "x.pgm", std::nullopt}, out), ConfigError);
}

// ---- benchmark -------------------------------------------------------------

TEST(CmdBenchmark, SmallRunWritesTablesAndRecord) {
  TempDir dir("bench");
  BenchmarkOptions opt;
  opt.config = mnist_config(dir);
  opt.config.limit = 3;
  opt.config.ratios = {2, 32};
  opt.methods = {"tval3", std::string(kBaselineMethod)};
  opt.datasets = {{"mnist", csbench::testing::fixture("mnist100-idx3-ubyte")}};

  const auto outcome = cmd_benchmark(opt);
  EXPECT_EQ(outcome.exit_code, kExitOk);
  const auto& record = outcome.record;
  EXPECT_EQ(record.rows.size(), 2u * 2u * 3u);
  EXPECT_TRUE(record.failures.empty());
  ASSERT_EQ(record.cells.size(), 4u);
  for (const auto& cell : record.cells) {
    EXPECT_EQ(cell.images, 3u);
    EXPECT_GT(cell.mean.speed, 0.0);
  }
  for (const auto& row : record.rows) {
    EXPECT_GE(row.psnr, 0.0);
    EXPECT_LE(row.psnr, 48.0);
    EXPECT_GE(row.seconds, 0.0);
  }

  // raw tables cover only the measured cells and survive a CSV round trip
  std::ifstream raw(opt.config.output_dir / kRawResultsName);
  const auto tables = parse_raw_rows(raw, "raw");
  ASSERT_EQ(tables.size(), 2u);
  for (const auto& t : tables) EXPECT_EQ(t.cells.size(), 2u);

  const auto json = nlohmann::json::parse(slurp(opt.config.output_dir / kRunRecordName));
  EXPECT_EQ(json.at("config").at("seed"), 0);
  EXPECT_EQ(json.at("images").size(), record.rows.size());
  EXPECT_EQ(json.at("cells").size(), 4u);
}

TEST(CmdBenchmark, AccuracyIsDeterministic) {
  TempDir dir("det");
  BenchmarkOptions opt;
  opt.config = mnist_config(dir);
  opt.config.limit = 2;
  opt.config.ratios = {4};
  opt.methods = {"tval3"};
  opt.datasets = {{"mnist", csbench::testing::fixture("mnist100-idx3-ubyte")}};
  const auto first = cmd_benchmark(opt).record;
  const auto second = cmd_benchmark(opt).record;
  ASSERT_EQ(first.rows.size(), second.rows.size());
  for (std::size_t i = 0; i < first.rows.size(); ++i) {
    EXPECT_EQ(first.rows[i].psnr, second.rows[i].psnr);
    EXPECT_EQ(first.rows[i].ssim, second.rows[i].ssim);
  }
}

TEST(CmdBenchmark, DefaultFlagOverridesSpecifics) {
  TempDir dir("defaults");
  BenchmarkOptions opt;
  opt.config = mnist_config(dir);
  opt.config.limit = 1;
  opt.config.ratios = {8};
  opt.config.specifics.set("max_iterations", "2");
  opt.methods = {"tval3"};
  opt.datasets = {{"mnist", csbench::testing::fixture("mnist100-idx3-ubyte")}};
  EXPECT_LE(cmd_benchmark(opt).record.rows.at(0).iterations, 2);
  opt.config.use_defaults = true;
  EXPECT_GT(cmd_benchmark(opt).record.rows.at(0).iterations, 2);
}

TEST(CmdBenchmark, RejectsLearnedAndUnknownInputs) {
  TempDir dir("reject");
  BenchmarkOptions opt;
  opt.config = mnist_config(dir);
  opt.config.limit = 1;
  opt.datasets = {{"mnist", csbench::testing::fixture("mnist100-idx3-ubyte")}};
  opt.methods = {"csgm"};
  EXPECT_THROW(cmd_benchmark(opt), UnsupportedMethodError);
  opt.methods = {"tval3"};
  opt.datasets = {{"imagenet", dir.path()}};
  EXPECT_THROW(cmd_benchmark(opt), ConfigError);
  opt.datasets = {};
  EXPECT_THROW(cmd_benchmark(opt), ConfigError);
}

TEST(RunRecord, PartialFailureThreshold) {
  RunRecord record;
  EXPECT_FALSE(record.partial_failure());
  record.rows.resize(99);
  record.failures.resize(1);
  EXPECT_FALSE(record.partial_failure());  // exactly 1%
  record.failures.resize(2);
  EXPECT_TRUE(record.partial_failure());
}

// ---- score -----------------------------------------------------------------

TEST(CmdScore, WritesReportsAndRanks) {
  TempDir dir("score");
  ScoreOptions opt;
  for (const char* f : {"tval3.csv", "lapran.csv", "csgm.csv"}) opt.inputs.push_back(csbench::testing::fixture(f));
  opt.output_dir = dir.path();
  opt.verbose = true;
  std::ostringstream out;
  const auto ranked = cmd_score(opt, out);
  ASSERT_EQ(ranked.size(), 3u);
  EXPECT_EQ(ranked.front().method, "LAPRAN");
  EXPECT_EQ(ranked.back().method, "CSGM");
  EXPECT_NE(out.str().find(" 1. LAPRAN"), std::string::npos) << out.str();
  for (const char* name : {kScoresName, kHistogramName, kBreakdownName})
    EXPECT_TRUE(std::filesystem::exists(dir / name)) << name;
}

TEST(CmdScore, InputErrors) {
  std::ostringstream out;
  EXPECT_THROW(cmd_score({}, out), ConfigError);
  ScoreOptions dup;
  dup.inputs = {csbench::testing::fixture("l1.csv"), csbench::testing::fixture("l1.csv")};
  TempDir dir("dup");
  dup.output_dir = dir.path();
  EXPECT_THROW(cmd_score(dup, out), ParseError);
}

// ---- datasets prepare ------------------------------------------------------

TEST(DatasetsPrepare, MnistIdxToPaddedPngs) {
  TempDir dir("prep");
  PrepareOptions opt;
  opt.spec = *find_dataset("mnist");
  opt.source = csbench::testing::fixture("mnist100-idx3-ubyte");
  opt.target = dir / "mnist";
  opt.limit = 10;
  const auto report = cmd_datasets_prepare(opt);
  EXPECT_EQ(report.written, 10u);
  const Image first = io::read_image(opt.target / "000000.png");
  EXPECT_EQ(first.width(), 32);
  EXPECT_EQ(first.height(), 32);
  EXPECT_EQ(first.channels(), 1);

  const std::string manifest = slurp(report.manifest);
  EXPECT_EQ(std::count(manifest.begin(), manifest.end(), '\n'), 10);
  EXPECT_EQ(manifest.find("  000000.png"), 64u);
  EXPECT_EQ(manifest.substr(0, 64), sha256_hex(io::read_file(opt.target / "000000.png")));

  // deterministic: a rerun reproduces the manifest
  opt.target = dir / "again";
  EXPECT_EQ(slurp(cmd_datasets_prepare(opt).manifest), manifest);

  // the prepared folder loads back as the same dataset
  const auto loaded = load_dataset(opt.spec, dir / "mnist", std::nullopt);
  EXPECT_EQ(loaded.images.size(), 10u);
  EXPECT_EQ(loaded.images[0].pixels().size(), first.pixels().size());
}

TEST(DatasetsPrepare, RgbFolderToGrayscale) {
  TempDir dir("prep-rgb");
  std::mt19937_64 rng(5);
  std::filesystem::create_directories(dir / "src");
  for (int i = 0; i < 3; ++i)
    io::write_image(dir / "src" / ("img" + std::to_string(i) + ".png"), csbench::testing::random_byte_image(rng, 3, 48, 40));
  std::ofstream(dir / "src" / "broken.png") << "not a png";

  PrepareOptions opt;
  opt.spec = *find_dataset("cifar10");
  opt.source = dir / "src";
  opt.target = dir / "out";
  opt.grayscale = true;
  const auto report = cmd_datasets_prepare(opt);
  EXPECT_EQ(report.written, 3u);
  EXPECT_EQ(report.failures.size(), 1u);
  const Image out = io::read_image(opt.target / "000002.png");
  EXPECT_EQ(out.channels(), 1);
  EXPECT_EQ(out.width(), 32);
  EXPECT_EQ(out.height(), 32);
}

TEST(DatasetsPrepare, EmptySourceIsAnError) {
  TempDir dir("prep-empty");
  std::filesystem::create_directories(dir / "src");
  PrepareOptions opt;
  opt.spec = *find_dataset("mnist");
  opt.source = dir / "src";
  opt.target = dir / "out";
  EXPECT_THROW(cmd_datasets_prepare(opt), Error);
}
