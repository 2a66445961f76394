// Acceptance gate: one PASS/FAIL line per headline criterion, nonzero exit if any fails.
//
// Set CSBENCH_MNIST_IDX to an official t10k-images IDX file to run the MNIST
// criteria on the first 100 test digits instead of the bundled 100-digit fixture.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "csbench/bench/commands.hpp"
#include "csbench/solvers/damp.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace csbench;
using namespace csbench::bench;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct PublishedScore {
  const char* file;
  const char* method;
  double speed;
  double accuracy;
  double total;
};

// Published benchmark scores, listed by descending total.
constexpr PublishedScore kPublished[] = {
    {"lapran.csv", "LAPRAN", 34.69, 23.60, 58.30},  {"reconnet.csv", "ReconNet", 37.00, 19.15, 56.15},
    {"csgan.csv", "CSGAN", 32.58, 19.03, 51.61},    {"istanet.csv", "ISTA-Net", 30.02, 20.69, 50.71},
    {"ldamp.csv", "LDAMP", 30.25, 17.21, 47.46},    {"tval3.csv", "TVAL-3", 18.43, 18.92, 37.35},
    {"damp.csv", "D-AMP", 2.35, 21.83, 24.19},      {"l1.csv", "L1", 3.78, 19.69, 23.46},
    {"nlrcs.csv", "NLR-CS", 1.69, 20.35, 22.04},    {"csgm.csv", "CSGM", 4.75, 13.07, 17.82},
};

constexpr double kScoreTolerance = 0.15;

std::string fmt(const char* pattern, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

std::vector<std::filesystem::path> fixture_paths() {
  std::vector<std::filesystem::path> out;
  for (const auto& p : kPublished) out.push_back(csbench::testing::fixture(p.file));
  return out;
}

std::vector<BenchmarkScore> score_fixtures(double* seconds = nullptr) {
  csbench::testing::TempDir dir("accept-score");
  ScoreOptions opt;
  opt.inputs = fixture_paths();
  opt.output_dir = dir.path();
  std::ostringstream sink;
  const auto start = std::chrono::steady_clock::now();
  auto ranked = cmd_score(opt, sink);
  if (seconds) *seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return ranked;
}

const BenchmarkScore& by_method(const std::vector<BenchmarkScore>& scores, const std::string& method) {
  for (const auto& s : scores)
    if (s.method == method) return s;
  throw std::runtime_error("no score for " + method);
}

// ---- scoring criteria ------------------------------------------------------

Verdict score_reproduction() {
  double seconds = 0.0;
  const auto scores = score_fixtures(&seconds);
  int matched = 0;
  std::string misses;
  for (const auto& p : kPublished) {
    const auto& s = by_method(scores, p.method);
    const std::pair<const char*, std::pair<double, double>> checks[] = {
        {"speed", {s.speed_score, p.speed}}, {"accuracy", {s.accuracy_score, p.accuracy}}, {"total", {s.total, p.total}}};
    for (const auto& [what, values] : checks) {
      if (std::abs(values.first - values.second) <= kScoreTolerance) ++matched;
      else misses += fmt(" %s %s %.2f (published %.2f);", p.method, what, values.first, values.second);
    }
  }
  const bool fast = seconds < 1.0;
  return {matched == 30 && fast,
          fmt("%d/30 within 0.15 in %.3f s;", matched, seconds) + (misses.empty() ? std::string(" all match") : misses)};
}

Verdict ranking_reproduction() {
  const auto ranked = score_fixtures();
  std::string order;
  bool same = ranked.size() == std::size(kPublished);
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    order += (i ? " > " : "") + ranked[i].method;
    if (same && ranked[i].method != kPublished[i].method) same = false;
  }
  const bool ends = !ranked.empty() && ranked.front().method == "LAPRAN" && ranked.back().method == "CSGM";
  return {ends && same, order};
}

Verdict normalizer_anchors() {
  const std::pair<double, double> anchors[] = {
      {normalize_psnr(48), 100.0}, {normalize_psnr(0), 10.0},  {normalize_ssim(1), 100.0},
      {normalize_ssim(0), 10.0},   {normalize_speed(9), 50.0}, {normalize_speed(99), 200.0 / 3.0},
  };
  double worst = 0.0;
  for (const auto& [got, want] : anchors) worst = std::max(worst, std::abs(got - want));
  return {worst <= 1e-9, fmt("max deviation %.3g over 6 anchors", worst)};
}

/// Speed score recomputed from the raw CSV text with its own weights and the
/// given logarithm; shares no code with the scoring module.
std::map<std::string, double> brute_force_speed(const std::function<double(double)>& log_fn) {
  const std::map<std::string, double> dataset_weight{{"MNIST", 1 / 21.0},  {"CelebA", 4 / 21.0},
                                                     {"CIFAR10", 3 / 21.0}, {"CIFAR10(Gray)", 2 / 21.0},
                                                     {"Bigset", 6 / 21.0},  {"Bigset(Gray)", 5 / 21.0}};
  const std::map<int, double> ratio_weight{{2, 1 / 31.0}, {4, 2 / 31.0}, {8, 4 / 31.0}, {16, 8 / 31.0}, {32, 16 / 31.0}};
  std::map<std::string, double> out;
  for (const auto& path : fixture_paths()) {
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      std::vector<std::string> f;
      std::stringstream ss(line);
      for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
      if (f.size() != 6) continue;
      const double speed = std::stod(f[5]);
      const double normalized = speed > 0 ? 100.0 / (1.0 + 1.0 / log_fn(1.0 + speed)) : 0.0;
      out[f[0]] += 0.5 * dataset_weight.at(f[1]) * ratio_weight.at(std::stoi(f[2])) * normalized;
    }
  }
  return out;
}

Verdict log_base_oracle() {
  const auto base10 = brute_force_speed([](double v) { return std::log10(v); });
  const auto natural = brute_force_speed([](double v) { return std::log(v); });
  int matched = 0;
  std::string misses;
  for (const auto& p : kPublished) {
    const double got = base10.at(p.method);
    if (std::abs(got - p.speed) <= kScoreTolerance) ++matched;
    else misses += fmt(" %s %.2f (published %.2f);", p.method, got, p.speed);
  }
  const double reconnet_gap = std::abs(natural.at("ReconNet") - 37.00);
  const bool pass = matched == 10 && reconnet_gap > 3.0;
  return {pass, fmt("base 10: %d/10 speed scores within 0.15;", matched) + misses +
                    fmt(" natural log misses ReconNet by %.2f", reconnet_gap)};
}

Verdict weight_invariants() {
  const auto w = WeightScheme::defaults();
  Rational product(0);
  for (const auto& [d, wd] : w.dataset)
    for (const auto& [r, wr] : w.ratio)
      for (const auto& [m, wm] : w.metric) product += wd * wr * wm;
  double worst = 0.0;
  for (const auto& s : score_fixtures()) worst = std::max(worst, std::abs(s.total - (s.speed_score + s.accuracy_score)));
  const bool pass = w.sums_to_one() && product == Rational(1) && worst <= 1e-9;
  return {pass, "dataset " + WeightScheme::sum(w.dataset).str() + ", ratio " + WeightScheme::sum(w.ratio).str() +
                    ", metric " + WeightScheme::sum(w.metric).str() + ", 90-term product " + product.str() +
                    fmt(", max |total - parts| %.2g", worst)};
}

// ---- MNIST runs ------------------------------------------------------------

struct MnistRuns {
  std::string source;
  std::size_t digits = 0;
  std::map<std::string, std::map<int, double>> mean_psnr;  // method -> ratio -> dB
  double seconds = 0.0;
};

MnistRuns run_mnist() {
  MnistRuns runs;
  const DatasetSpec spec = *find_dataset("mnist");
  const char* env = std::getenv("CSBENCH_MNIST_IDX");
  const std::filesystem::path path = env && *env ? std::filesystem::path(env) : csbench::testing::fixture("mnist100-idx3-ubyte");
  runs.source = path.filename().string();
  const LoadedDataset data = load_dataset(spec, path, 100);
  runs.digits = data.images.size();

  RunConfig cfg;
  cfg.apply_dataset(spec);
  const auto start = std::chrono::steady_clock::now();
  auto collect = [&](const RunRecord& record) {
    for (const auto& c : record.cells) runs.mean_psnr[c.method][c.ratio] = c.mean.psnr;
  };
  cfg.ratios = {2, 4, 8, 16, 32};
  collect(run_benchmark(cfg, {"tval3"}, {data}));
  cfg.ratios = {2};
  collect(run_benchmark(cfg, {"l1", "damp", std::string(kBaselineMethod)}, {data}));
  runs.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return runs;
}

Verdict tv_recovery(const MnistRuns& runs) {
  const double p = runs.mean_psnr.at("tval3").at(2);
  return {runs.digits == 100 && p >= 40.0,
          fmt("TVAL-3 mean PSNR %.2f dB on %zu digits (%s) at ratio 2; MNIST runs took %.0f s", p, runs.digits,
              runs.source.c_str(), runs.seconds)};
}

Verdict ratio_monotonicity(const MnistRuns& runs) {
  const auto& column = runs.mean_psnr.at("tval3");
  std::string text;
  bool pass = true;
  double prev = 0.0;
  for (int r : kRatios) {
    const double p = column.at(r);
    if (r != kRatios.front() && p > prev + 0.5) pass = false;
    text += fmt("%sCR%d %.2f", text.empty() ? "" : ", ", r, p);
    prev = p;
  }
  return {pass, text};
}

Verdict damp_sparse_recovery() {
  const int n = 256, m = 128, k = 10;
  SolverConfig cfg = default_config("damp");
  int good = 0;
  double worst = 0.0;
  int most_iterations = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> amp(0.0, 1.0);
    std::vector<int> support(n);
    std::iota(support.begin(), support.end(), 0);
    std::shuffle(support.begin(), support.end(), rng);
    Vector x = Vector::Zero(n);
    for (int i = 0; i < k; ++i) x(support[i]) = amp(rng);
    const SensingMatrix a = build_matrix(seed + 1000, m, n, MatrixKind::gaussian_orthonormal_rows);
    const auto sol = damp_reconstruct(a.apply(x), a, {16, 16}, cfg);
    const double err = (sol.x - x).norm() / x.norm();
    worst = std::max(worst, err);
    most_iterations = std::max(most_iterations, sol.iterations);
    if (err <= 1e-3 && sol.iterations <= 30) ++good;
  }
  return {good == 20, fmt("%d/20 seeds recovered; worst relative error %.2e, at most %d iterations", good, worst,
                          most_iterations)};
}

Verdict metric_oracles() {
  std::mt19937_64 rng(2024);
  double worst_ssim = 0.0;
  for (int i = 0; i < 10; ++i) {
    const Image a = csbench::testing::random_image(rng, 1, 32, 32);
    const Image b = csbench::testing::random_image(rng, 1, 32, 32);
    worst_ssim = std::max(worst_ssim, std::abs(ssim(a, b) - csbench::testing::ssim_oracle(a, b)));
  }
  int psnr_ok = 0;
  for (int i = 0; i < 100; ++i) {
    const Image a = csbench::testing::random_image(rng, 1, 32, 32);
    const Image b = csbench::testing::random_image(rng, 1, 32, 32);
    if (psnr(a, a) == 48.0 && psnr(a, b) == psnr(b, a)) ++psnr_ok;
  }
  return {worst_ssim <= 1e-6 && psnr_ok == 100,
          fmt("SSIM vs direct oracle max diff %.2e on 10 pairs; PSNR self/symmetry holds on %d/100 pairs", worst_ssim,
              psnr_ok)};
}

Verdict baseline_dominance(const MnistRuns& runs) {
  const double base = runs.mean_psnr.at(std::string(kBaselineMethod)).at(2);
  std::string text = fmt("pinv %.2f", base);
  bool pass = true;
  for (const char* method : {"tval3", "l1", "damp"}) {
    const double p = runs.mean_psnr.at(method).at(2);
    pass = pass && p >= base;
    text += fmt(", %s %.2f", method, p);
  }
  return {pass, text + " dB at ratio 2"};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](const char* name, const std::function<Verdict()>& check) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("%s  %-28s %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
  };

  report("score reproduction", score_reproduction);
  report("ranking reproduction", ranking_reproduction);
  report("normalizer anchors", normalizer_anchors);
  report("log-base oracle", log_base_oracle);
  report("weight invariants", weight_invariants);

  MnistRuns runs;
  std::string mnist_error;
  try {
    runs = run_mnist();
  } catch (const std::exception& e) {
    mnist_error = e.what();
  }
  auto with_runs = [&](Verdict (*check)(const MnistRuns&)) {
    return [&, check] {
      if (!mnist_error.empty()) throw std::runtime_error(mnist_error);
      return check(runs);
    };
  };
  report("TV solver recovery", with_runs(tv_recovery));
  report("ratio monotonicity", with_runs(ratio_monotonicity));
  report("D-AMP sparse recovery", damp_sparse_recovery);
  report("metric oracles", metric_oracles);
  report("baseline dominance", with_runs(baseline_dominance));

  std::printf("%d of 10 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
