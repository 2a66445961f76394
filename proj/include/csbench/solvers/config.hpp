#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "csbench/error.hpp"
#include "csbench/sensing.hpp"

namespace csbench {

/// String-keyed method parameters, parsed on demand.
class Specifics {
 public:
  Specifics() = default;
  Specifics(std::initializer_list<std::pair<const std::string, std::string>> init) : values_(init) {}

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    double v = 0;
    const auto& s = it->second;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw ConfigError("specifics '" + key + "' is not a number: '" + s + "'");
    return v;
  }

  long long get_int(const std::string& key, long long fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    long long v = 0;
    const auto& s = it->second;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw ConfigError("specifics '" + key + "' is not an integer: '" + s + "'");
    return v;
  }

  friend bool operator==(const Specifics&, const Specifics&) = default;

 private:
  std::map<std::string, std::string> values_;
};

struct SolverConfig {
  int max_iterations = 200;
  double tolerance = 1e-4;
  Specifics specifics;

  void validate() const {
    if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
    if (!(tolerance > 0)) throw ConfigError("tolerance must be > 0");
    if (specifics.get_string("stage", "testing") == "training")
      throw ConfigError("model-based solvers have no training stage");
  }
};

/// Per-iteration traces, filled when a solver runs.
struct SolverDiagnostics {
  std::vector<double> objective;
  std::vector<double> residual;
  std::vector<double> sigma;
  std::vector<double> primal_residual;
};

/// Result for one channel.
struct ChannelSolution {
  Vector x;
  int iterations = 0;
  double final_residual = 0.0;
  SolverDiagnostics diagnostics;
};

/// ||A x - y|| / ||y||, or ||A x|| when y is zero.
inline double relative_residual(const SensingMatrix& a, const Vector& x, const Vector& y) {
  const double r = (a.entries() * x - y).norm();
  const double ny = y.norm();
  return ny > 0 ? r / ny : r;
}

inline double relative_change(const Vector& next, const Vector& prev) {
  const double denom = prev.norm();
  const double diff = (next - prev).norm();
  return denom > 0 ? diff / denom : diff;
}

namespace detail {

inline void check_dimensions(const Vector& y, const SensingMatrix& a, Shape shape) {
  if (static_cast<std::size_t>(y.size()) != a.m())
    throw PreconditionError("measurement length " + std::to_string(y.size()) + " != m=" + std::to_string(a.m()));
  if (shape.size() != a.n())
    throw PreconditionError("image shape " + std::to_string(shape.height) + "x" + std::to_string(shape.width) +
                            " does not match n=" + std::to_string(a.n()));
}

}  // namespace detail

}  // namespace csbench
