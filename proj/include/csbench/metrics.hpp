#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <mutex>
#include <vector>

#include "csbench/error.hpp"
#include "csbench/image.hpp"

namespace csbench {

inline constexpr double kPsnrCeiling = 48.0;

/// Mean metrics over a test set.
struct MetricTriple {
  double psnr = 0.0;
  double ssim = 0.0;
  double speed = 0.0;
};

namespace detail {

inline void require_same_shape(const Image& a, const Image& b) {
  if (a.channels() != b.channels() || a.height() != b.height() || a.width() != b.width())
    throw PreconditionError("metric inputs differ in shape");
}

}  // namespace detail

/// PSNR at peak 1 over all channels, clamped to [0, 48]; identical inputs give 48.
inline double psnr(const Image& a, const Image& b) {
  detail::require_same_shape(a, b);
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  double sum = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const double d = pa[i] - pb[i];
    sum += d * d;
  }
  const double mse = sum / static_cast<double>(pa.size());
  if (mse == 0.0) return kPsnrCeiling;
  return std::clamp(10.0 * std::log10(1.0 / mse), 0.0, kPsnrCeiling);
}

/// Structural similarity parameters (the original SSIM defaults at peak 1).
struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};

namespace detail {

inline std::vector<double> gaussian_kernel(int size, double sigma) {
  std::vector<double> k(static_cast<std::size_t>(size));
  const double center = (size - 1) / 2.0;
  double total = 0.0;
  for (int i = 0; i < size; ++i) {
    k[i] = std::exp(-((i - center) * (i - center)) / (2.0 * sigma * sigma));
    total += k[i];
  }
  for (double& v : k) v /= total;
  return k;
}

/// Separable Gaussian filtering over "valid" window positions only.
inline std::vector<double> filter_valid(const std::vector<double>& plane, int h, int w, const std::vector<double>& k) {
  const int size = static_cast<int>(k.size());
  const int oh = h - size + 1;
  const int ow = w - size + 1;
  std::vector<double> rows(static_cast<std::size_t>(h) * ow);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int t = 0; t < size; ++t) s += k[t] * plane[static_cast<std::size_t>(y) * w + x + t];
      rows[static_cast<std::size_t>(y) * ow + x] = s;
    }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int t = 0; t < size; ++t) s += k[t] * rows[static_cast<std::size_t>(y + t) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  return out;
}

}  // namespace detail

/// Mean SSIM: Gaussian window statistics at every fully contained window
/// position, averaged per channel and then over channels, clamped to [0, 1].
/// The expression is symmetric in (a, b) term by term, so ssim(a,b) == ssim(b,a) exactly.
inline double ssim(const Image& a, const Image& b, const SsimParams& p = {}) {
  detail::require_same_shape(a, b);
  if (std::min(a.height(), a.width()) < p.window)
    throw PreconditionError("image smaller than the " + std::to_string(p.window) + "x" + std::to_string(p.window) +
                            " SSIM window");
  const double c1 = (p.k1 * 1.0) * (p.k1 * 1.0);
  const double c2 = (p.k2 * 1.0) * (p.k2 * 1.0);
  const auto kernel = detail::gaussian_kernel(p.window, p.sigma);
  const int h = a.height();
  const int w = a.width();

  double total = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    const auto ca = a.channel(c);
    const auto cb = b.channel(c);
    std::vector<double> pa(ca.begin(), ca.end()), pb(cb.begin(), cb.end());
    std::vector<double> aa(pa.size()), bb(pa.size()), ab(pa.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
      aa[i] = pa[i] * pa[i];
      bb[i] = pb[i] * pb[i];
      ab[i] = pa[i] * pb[i];
    }
    const auto mu_a = detail::filter_valid(pa, h, w, kernel);
    const auto mu_b = detail::filter_valid(pb, h, w, kernel);
    const auto e_aa = detail::filter_valid(aa, h, w, kernel);
    const auto e_bb = detail::filter_valid(bb, h, w, kernel);
    const auto e_ab = detail::filter_valid(ab, h, w, kernel);
    double sum = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
      const double mab = mu_a[i] * mu_b[i];
      const double ma2 = mu_a[i] * mu_a[i];
      const double mb2 = mu_b[i] * mu_b[i];
      const double var_sum = (e_aa[i] - ma2) + (e_bb[i] - mb2);
      const double cov = e_ab[i] - mab;
      sum += ((2.0 * mab + c1) * (2.0 * cov + c2)) / ((ma2 + mb2 + c1) * (var_sum + c2));
    }
    total += sum / static_cast<double>(mu_a.size());
  }
  return std::clamp(total / a.channels(), 0.0, 1.0);
}

/// Accumulates wall-clock time spent inside solver calls.
class ThroughputClock {
 public:
  using clock = std::chrono::steady_clock;

  /// RAII section: time between construction and destruction is added to the clock
  /// and counts as one finished image unless `cancel()` is called.
  class Section {
   public:
    explicit Section(ThroughputClock& owner) : owner_(owner), start_(clock::now()) {}
    Section(const Section&) = delete;
    Section& operator=(const Section&) = delete;
    ~Section() {
      owner_.elapsed_ += std::chrono::duration<double>(clock::now() - start_).count();
      if (!cancelled_) ++owner_.images_done_;
    }
    void cancel() { cancelled_ = true; }

   private:
    ThroughputClock& owner_;
    clock::time_point start_;
    bool cancelled_ = false;
  };

  Section time_one() { return Section(*this); }

  void add(std::size_t images, double seconds) {
    if (seconds < 0) throw PreconditionError("elapsed time must be >= 0");
    images_done_ += images;
    elapsed_ += seconds;
  }

  std::size_t images_done() const { return images_done_; }
  double elapsed() const { return elapsed_; }

  /// Images per second; throws when no time was resolved.
  double speed() const {
    if (!(elapsed_ > 0.0)) throw MeasurementResolutionError("zero elapsed time; cannot compute throughput");
    return static_cast<double>(images_done_) / elapsed_;
  }

 private:
  std::size_t images_done_ = 0;
  double elapsed_ = 0.0;
};

/// Held by whoever is timing reconstructions; no two timed runs overlap.
inline std::mutex& timing_mutex() {
  static std::mutex m;
  return m;
}

/// Times `reconstruct_one(i)` for i in [0, count) sequentially and returns
/// images per second. Only the calls themselves are timed.
template <class Fn>
double measure_throughput(std::size_t count, Fn&& reconstruct_one) {
  if (count == 0) throw PreconditionError("throughput needs a non-empty dataset");
  std::lock_guard lock(timing_mutex());
  ThroughputClock clock;
  for (std::size_t i = 0; i < count; ++i) {
    auto section = clock.time_one();
    reconstruct_one(i);
  }
  return clock.speed();
}

/// Two repeated measurements agree when they differ by less than `tolerance` relative to the larger.
inline bool throughput_stable(double first, double second, double tolerance = 0.2) {
  const double hi = std::max(first, second);
  if (hi <= 0) return first == second;
  return std::abs(first - second) / hi < tolerance;
}

}  // namespace csbench
