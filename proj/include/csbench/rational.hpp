#pragma once

#include <charconv>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "csbench/error.hpp"

namespace csbench {

/// Exact fraction with a positive denominator, always stored in lowest terms.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t num) : num_(num), den_(1) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ == 0) throw PreconditionError("rational with zero denominator");
    normalize();
  }

  constexpr std::int64_t num() const { return num_; }
  constexpr std::int64_t den() const { return den_; }
  constexpr double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend Rational operator+(Rational a, Rational b) {
    const std::int64_t g = std::gcd(a.den_, b.den_);
    return {a.num_ * (b.den_ / g) + b.num_ * (a.den_ / g), a.den_ / g * b.den_};
  }
  friend Rational operator-(Rational a, Rational b) { return a + Rational(-b.num_, b.den_); }
  friend Rational operator*(Rational a, Rational b) {
    const std::int64_t g1 = std::gcd(a.num_, b.den_);
    const std::int64_t g2 = std::gcd(b.num_, a.den_);
    return {(a.num_ / (g1 ? g1 : 1)) * (b.num_ / (g2 ? g2 : 1)),
            (a.den_ / (g2 ? g2 : 1)) * (b.den_ / (g1 ? g1 : 1))};
  }
  Rational& operator+=(Rational b) { return *this = *this + b; }
  Rational& operator*=(Rational b) { return *this = *this * b; }

  friend bool operator==(Rational a, Rational b) = default;
  friend std::strong_ordering operator<=>(Rational a, Rational b) {
    // Cross-multiplication in 128 bits cannot overflow for 64-bit operands.
    __extension__ using wide = __int128;
    const wide lhs = static_cast<wide>(a.num_) * b.den_;
    const wide rhs = static_cast<wide>(b.num_) * a.den_;
    return lhs <=> rhs;
  }

  std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

  /// Parses "p/q", "p" or an exact decimal such as "0.25".
  static Rational parse(std::string_view text) {
    const auto slash = text.find('/');
    const auto dot = text.find('.');
    auto parse_int = [&](std::string_view part) {
      std::int64_t v = 0;
      const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
      if (ec != std::errc() || ptr != part.data() + part.size() || part.empty())
        throw ParseError("invalid rational '" + std::string(text) + "'");
      return v;
    };
    if (slash == std::string_view::npos && dot != std::string_view::npos) {
      const std::string_view frac = text.substr(dot + 1);
      if (frac.empty() || frac.size() > 15 || frac.front() == '-' || frac.front() == '+')
        throw ParseError("invalid rational '" + std::string(text) + "'");
      std::int64_t scale = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
      const std::string_view whole = text.substr(0, dot);
      const bool negative = !whole.empty() && whole.front() == '-';
      const std::int64_t w = whole.empty() || whole == "-" ? 0 : parse_int(whole);
      const std::int64_t f = parse_int(frac);
      return {(negative ? -1 : 1) * (std::abs(w) * scale + f), scale};
    }
    if (slash == std::string_view::npos) return {parse_int(text)};
    return {parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1))};
  }

 private:
  void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace csbench
