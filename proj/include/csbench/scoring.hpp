#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "csbench/error.hpp"
#include "csbench/image.hpp"
#include "csbench/rational.hpp"

namespace csbench {

inline constexpr std::array<int, 5> kRatios{2, 4, 8, 16, 32};

enum class Metric { psnr, ssim, speed };

inline std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::psnr: return "psnr";
    case Metric::ssim: return "ssim";
    case Metric::speed: return "speed";
  }
  return "?";
}

// Normalizers map raw metrics onto 0-100.

inline double normalize_psnr(double v) {
  if (!(v >= 0.0 && v <= 48.0)) throw PreconditionError("PSNR outside [0,48]");
  return std::pow(10.0, v / 48.0 - 1.0) * 100.0;
}

inline double normalize_ssim(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw PreconditionError("SSIM outside [0,1]");
  return std::pow(10.0, v - 1.0) * 100.0;
}

/// 100 / (1 + 1/log10(1 + v)), continuous at v = 0 where it is 0.
inline double normalize_speed(double v) {
  if (!(v >= 0.0) || std::isinf(v)) throw PreconditionError("speed must be finite and >= 0");
  if (v == 0.0) return 0.0;
  return 100.0 / (1.0 + 1.0 / std::log10(1.0 + v));
}

struct RawResultCell {
  std::string dataset;  // canonical id
  int ratio = 2;
  double psnr = 0.0;
  double ssim = 0.0;
  double speed = 0.0;
};

/// The 6 x 5 grid of (PSNR, SSIM, speed) results for one method.
struct RawResultTable {
  std::string method;
  std::vector<RawResultCell> cells;

  const RawResultCell* find(std::string_view dataset, int ratio) const {
    for (const auto& c : cells)
      if (c.dataset == dataset && c.ratio == ratio) return &c;
    return nullptr;
  }
};

/// Throws CompletenessError unless every (dataset, ratio) pair appears exactly once.
inline void check_complete(const RawResultTable& t) {
  std::map<std::pair<std::string, int>, int> seen;
  for (const auto& c : t.cells) {
    if (++seen[{c.dataset, c.ratio}] > 1)
      throw CompletenessError(t.method + ": duplicate cell (" + c.dataset + ", " + std::to_string(c.ratio) + ")");
  }
  for (const auto& d : builtin_datasets()) {
    for (int r : kRatios) {
      if (!seen.count({d.name, r}))
        throw CompletenessError(t.method + ": missing cell (" + d.name + ", " + std::to_string(r) + ")");
    }
  }
  if (seen.size() != builtin_datasets().size() * kRatios.size())
    throw CompletenessError(t.method + ": unexpected cells outside the 6 x 5 grid");
}

struct WeightScheme {
  std::map<std::string, Rational> dataset;
  std::map<int, Rational> ratio;
  std::map<Metric, Rational> metric;

  /// Dataset, compression-ratio and metric weights of the published benchmark.
  static WeightScheme defaults() {
    WeightScheme w;
    for (const auto& d : builtin_datasets()) w.dataset[d.name] = d.weight;
    w.ratio = {{2, Rational(1, 31)}, {4, Rational(2, 31)}, {8, Rational(4, 31)}, {16, Rational(8, 31)},
               {32, Rational(16, 31)}};
    w.metric = {{Metric::psnr, Rational(1, 4)}, {Metric::ssim, Rational(1, 4)}, {Metric::speed, Rational(1, 2)}};
    return w;
  }

  /// Every dataset, ratio and metric has a non-negative weight.
  void validate() const {
    for (const auto& d : builtin_datasets())
      if (!dataset.count(d.name) || dataset.at(d.name) < Rational(0))
        throw ConfigError("weight missing or negative for dataset " + d.name);
    for (int r : kRatios)
      if (!ratio.count(r) || ratio.at(r) < Rational(0))
        throw ConfigError("weight missing or negative for ratio " + std::to_string(r));
    for (Metric m : {Metric::psnr, Metric::ssim, Metric::speed})
      if (!metric.count(m) || metric.at(m) < Rational(0))
        throw ConfigError("weight missing or negative for metric " + std::string(to_string(m)));
  }

  static Rational sum(const auto& map) {
    Rational s(0);
    for (const auto& [key, value] : map) s += value;
    return s;
  }

  bool sums_to_one() const {
    return sum(dataset) == Rational(1) && sum(ratio) == Rational(1) && sum(metric) == Rational(1);
  }
};

/// One of the 90 weighted terms.
struct ScoreTerm {
  std::string dataset;
  int ratio = 0;
  Metric metric = Metric::psnr;
  double raw = 0.0;
  double normalized = 0.0;
  Rational weight;
  double contribution = 0.0;
};

struct BenchmarkScore {
  std::string method;
  double speed_score = 0.0;
  double accuracy_score = 0.0;
  double total = 0.0;
  std::vector<ScoreTerm> terms;
};

/// Weighted sum of the 90 normalized results. PSNR and SSIM are clamped into
/// their ranges before normalization so near-ceiling rounding does not trip the
/// normalizer preconditions.
inline BenchmarkScore compute_score(const RawResultTable& table, const WeightScheme& w = WeightScheme::defaults()) {
  check_complete(table);
  w.validate();
  BenchmarkScore s;
  s.method = table.method;
  for (const auto& d : builtin_datasets()) {
    for (int r : kRatios) {
      const RawResultCell& c = *table.find(d.name, r);
      const Rational cell_weight = w.dataset.at(d.name) * w.ratio.at(r);
      const std::array<std::pair<Metric, double>, 3> raws{{
          {Metric::psnr, c.psnr}, {Metric::ssim, c.ssim}, {Metric::speed, c.speed}}};
      for (const auto& [metric, raw] : raws) {
        double normalized = 0.0;
        switch (metric) {
          case Metric::psnr: normalized = normalize_psnr(std::clamp(raw, 0.0, 48.0)); break;
          case Metric::ssim: normalized = normalize_ssim(std::clamp(raw, 0.0, 1.0)); break;
          case Metric::speed: normalized = normalize_speed(raw); break;
        }
        const Rational weight = cell_weight * w.metric.at(metric);
        const double contribution = weight.to_double() * normalized;
        (metric == Metric::speed ? s.speed_score : s.accuracy_score) += contribution;
        s.terms.push_back({d.name, r, metric, raw, normalized, weight, contribution});
      }
    }
  }
  s.total = s.speed_score + s.accuracy_score;
  return s;
}

/// Descending by total, ties by method name.
inline std::vector<BenchmarkScore> rank_methods(std::vector<BenchmarkScore> scores) {
  std::stable_sort(scores.begin(), scores.end(), [](const BenchmarkScore& a, const BenchmarkScore& b) {
    if (a.total != b.total) return a.total > b.total;
    return a.method < b.method;
  });
  return scores;
}

// ---------------------------------------------------------------------------
// CSV ingestion and reports

namespace detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto at = line.find(sep, start);
    out.push_back(trim(line.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start)));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return out;
}

inline double parse_number(const std::string& text, const std::string& where) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() || !std::isfinite(v))
    throw ParseError(where + ": '" + text + "' is not a number");
  return v;
}

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), ptr};
}

}  // namespace detail

inline constexpr std::string_view kRawCsvHeader = "method,dataset,ratio,psnr,ssim,speed";

/// Parses raw-result rows into one table per method, in first-appearance
/// order. Tables are not checked for completeness here; see `parse_raw_csv`.
inline std::vector<RawResultTable> parse_raw_rows(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t row = 0;
  bool header_seen = false;
  std::vector<RawResultTable> tables;
  while (std::getline(in, line)) {
    ++row;
    if (row == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    const std::string trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    const std::string where = source + ":" + std::to_string(row);
    if (!header_seen) {
      std::string lowered;
      for (char ch : trimmed)
        if (ch != ' ') lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
      if (lowered != kRawCsvHeader)
        throw ParseError(where + ": expected header '" + std::string(kRawCsvHeader) + "'");
      header_seen = true;
      continue;
    }
    const auto f = detail::split(trimmed, ',');
    if (f.size() != 6) throw ParseError(where + ": expected 6 fields, got " + std::to_string(f.size()));
    const auto spec = find_dataset(f[1]);
    if (!spec) throw ParseError(where + ": unknown dataset '" + f[1] + "'");
    const double ratio = detail::parse_number(f[2], where);
    if (std::find(kRatios.begin(), kRatios.end(), ratio) == kRatios.end())
      throw ParseError(where + ": ratio " + f[2] + " is not one of 2, 4, 8, 16, 32");
    RawResultCell cell{spec->name, static_cast<int>(ratio), detail::parse_number(f[3], where),
                       detail::parse_number(f[4], where), detail::parse_number(f[5], where)};
    if (cell.speed < 0) throw ParseError(where + ": negative speed");
    if (cell.psnr < 0) throw ParseError(where + ": negative PSNR");
    if (f[0].empty()) throw ParseError(where + ": empty method name");

    auto it = std::find_if(tables.begin(), tables.end(), [&](const auto& t) { return t.method == f[0]; });
    if (it == tables.end()) it = tables.insert(tables.end(), RawResultTable{f[0], {}});
    it->cells.push_back(std::move(cell));
  }
  if (!header_seen) throw ParseError(source + ": empty file");
  return tables;
}

/// Complete tables from a raw-result CSV.
inline std::vector<RawResultTable> parse_raw_csv(std::istream& in, const std::string& source = "<stream>") {
  auto tables = parse_raw_rows(in, source);
  for (const auto& t : tables) {
    try {
      check_complete(t);
    } catch (const CompletenessError& e) {
      throw CompletenessError(source + ": " + e.what());
    }
  }
  return tables;
}

inline std::vector<RawResultTable> parse_raw_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return parse_raw_csv(in, path.string());
}

/// Rows in grid order with shortest round-trip number formatting.
inline void write_raw_csv(std::ostream& out, const std::vector<RawResultTable>& tables) {
  out << kRawCsvHeader << '\n';
  for (const auto& t : tables)
    for (const auto& c : t.cells)
      out << t.method << ',' << c.dataset << ',' << c.ratio << ',' << detail::format_double(c.psnr) << ','
          << detail::format_double(c.ssim) << ',' << detail::format_double(c.speed) << '\n';
}

inline void write_score_report(std::ostream& out, const std::vector<BenchmarkScore>& scores) {
  out << "method,speed_score,accuracy_score,total\n";
  char buf[128];
  for (const auto& s : scores) {
    std::snprintf(buf, sizeof buf, "%.4f,%.4f,%.4f", s.speed_score, s.accuracy_score, s.total);
    out << s.method << ',' << buf << '\n';
  }
}

inline void write_histogram(std::ostream& out, const std::vector<BenchmarkScore>& scores) {
  out << "method,total\n";
  char buf[64];
  for (const auto& s : scores) {
    std::snprintf(buf, sizeof buf, "%.4f", s.total);
    out << s.method << ',' << buf << '\n';
  }
}

inline void write_score_terms(std::ostream& out, const std::vector<BenchmarkScore>& scores) {
  out << "method,dataset,ratio,metric,raw,normalized,weight,contribution\n";
  for (const auto& s : scores)
    for (const auto& t : s.terms)
      out << s.method << ',' << t.dataset << ',' << t.ratio << ',' << to_string(t.metric) << ','
          << detail::format_double(t.raw) << ',' << detail::format_double(t.normalized) << ',' << t.weight.str()
          << ',' << detail::format_double(t.contribution) << '\n';
}

// ---------------------------------------------------------------------------
// Weight-scheme files
//
//   [datasets]
//   mnist = 1/21
//   ...
//   [ratios]
//   2 = 1/31
//   ...
//   [metrics]
//   psnr = 1/4
//   ssim = 1/4
//   speed = 1/2
//
// '#' starts a comment. Sections may be omitted; omitted sections keep the
// default weights. Each supplied section must sum to exactly 1.

inline WeightScheme parse_weights(std::istream& in, const std::string& source = "<weights>") {
  WeightScheme w = WeightScheme::defaults();
  std::string section;
  std::map<std::string, std::map<std::string, Rational>> given;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const std::string where = source + ":" + std::to_string(row);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ParseError(where + ": malformed section header");
      section = detail::trim(std::string_view(t).substr(1, t.size() - 2));
      if (section != "datasets" && section != "ratios" && section != "metrics")
        throw ParseError(where + ": unknown section [" + section + "]");
      given[section];
      continue;
    }
    if (section.empty()) throw ParseError(where + ": entry before any section");
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(where + ": expected name = p/q");
    const std::string key = detail::trim(std::string_view(t).substr(0, eq));
    try {
      given[section][key] = Rational::parse(detail::trim(std::string_view(t).substr(eq + 1)));
    } catch (const Error& e) {
      throw ParseError(where + ": " + e.what());
    }
  }

  if (given.count("datasets")) {
    w.dataset.clear();
    for (const auto& [key, value] : given["datasets"]) {
      const auto spec = find_dataset(key);
      if (!spec) throw ParseError(source + ": unknown dataset '" + key + "'");
      w.dataset[spec->name] = value;
    }
  }
  if (given.count("ratios")) {
    w.ratio.clear();
    for (const auto& [key, value] : given["ratios"]) {
      int r = 0;
      const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), r);
      if (ec != std::errc() || ptr != key.data() + key.size() ||
          std::find(kRatios.begin(), kRatios.end(), r) == kRatios.end())
        throw ParseError(source + ": unknown ratio '" + key + "'");
      w.ratio[r] = value;
    }
  }
  if (given.count("metrics")) {
    w.metric.clear();
    for (const auto& [key, value] : given["metrics"]) {
      if (key == "psnr") w.metric[Metric::psnr] = value;
      else if (key == "ssim") w.metric[Metric::ssim] = value;
      else if (key == "speed") w.metric[Metric::speed] = value;
      else throw ParseError(source + ": unknown metric '" + key + "'");
    }
  }
  w.validate();
  if (!w.sums_to_one()) throw ConfigError(source + ": each weight section must sum to exactly 1");
  return w;
}

inline WeightScheme load_weights(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open weights file " + path.string());
  return parse_weights(in, path.string());
}

inline void write_weights(std::ostream& out, const WeightScheme& w) {
  out << "[datasets]\n";
  for (const auto& [k, v] : w.dataset) out << k << " = " << v << '\n';
  out << "[ratios]\n";
  for (const auto& [k, v] : w.ratio) out << k << " = " << v << '\n';
  out << "[metrics]\n";
  for (const auto& [k, v] : w.metric) out << to_string(k) << " = " << v << '\n';
}

}  // namespace csbench
