#pragma once

// Shared vocabulary: error types, compensated summation and log-space
// magnitudes for constants that overflow a double.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace effdio {

/// Precondition violated by caller-supplied parameters (maps to CLI exit 2).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A search or series that cannot terminate for the given inputs.
class UnboundedError : public DomainError {
 public:
  using DomainError::DomainError;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}
inline void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

// Neumaier variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Nonnegative real stored as its natural logarithm so that constants such as
/// 2*exp(6000) can be carried and compared without overflow.
class Magnitude {
 public:
  constexpr Magnitude() = default;

  static Magnitude zero() { return Magnitude(); }
  static Magnitude from_value(double v) {
    if (!(v >= 0.0)) throw DomainError("Magnitude requires a nonnegative value");
    Magnitude m;
    m.log_ = v == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(v);
    return m;
  }
  static Magnitude from_log(double l) {
    if (std::isnan(l)) throw DomainError("Magnitude from NaN logarithm");
    Magnitude m;
    m.log_ = l;
    return m;
  }
  static Magnitude infinite() {
    return from_log(std::numeric_limits<double>::infinity());
  }

  double log() const noexcept { return log_; }
  double log10() const noexcept { return log_ / std::log(10.0); }
  bool is_zero() const noexcept { return std::isinf(log_) && log_ < 0; }
  bool is_infinite() const noexcept { return std::isinf(log_) && log_ > 0; }
  /// True when value() is an ordinary finite double.
  bool representable() const noexcept {
    return log_ < std::log(std::numeric_limits<double>::max());
  }
  /// The plain value; +inf when beyond double range.
  double value() const noexcept {
    return representable() ? std::exp(log_) : std::numeric_limits<double>::infinity();
  }

  /// Scientific rendering that stays meaningful beyond double range.
  std::string to_string() const {
    if (is_zero()) return "0";
    if (is_infinite()) return "inf";
    char buf[64];
    if (representable() && log_ > -700.0) {
      std::snprintf(buf, sizeof buf, "%.10g", value());
      return buf;
    }
    const double l10 = log10();
    double e = std::floor(l10);
    double mant = std::pow(10.0, l10 - e);
    if (mant >= 9.9999999995) {
      mant /= 10.0;
      e += 1.0;
    }
    std::snprintf(buf, sizeof buf, "%.10ge+%.0f", mant, e);
    return buf;
  }

  friend Magnitude operator*(Magnitude a, Magnitude b) {
    if (a.is_zero() || b.is_zero()) return zero();
    return from_log(a.log_ + b.log_);
  }
  friend Magnitude operator/(Magnitude a, Magnitude b) {
    if (b.is_zero()) throw DomainError("Magnitude division by zero");
    if (a.is_zero()) return zero();
    return from_log(a.log_ - b.log_);
  }
  friend Magnitude operator+(Magnitude a, Magnitude b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const double hi = std::max(a.log_, b.log_);
    const double lo = std::min(a.log_, b.log_);
    if (std::isinf(hi)) return infinite();
    return from_log(hi + std::log1p(std::exp(lo - hi)));
  }
  Magnitude pow(double p) const {
    if (is_zero()) return p > 0 ? zero() : (p == 0 ? from_value(1.0) : infinite());
    return from_log(log_ * p);
  }
  friend bool operator<(Magnitude a, Magnitude b) { return a.log_ < b.log_; }
  friend bool operator<=(Magnitude a, Magnitude b) { return a.log_ <= b.log_; }
  friend bool operator>(Magnitude a, Magnitude b) { return a.log_ > b.log_; }
  friend bool operator>=(Magnitude a, Magnitude b) { return a.log_ >= b.log_; }
  friend bool operator==(Magnitude a, Magnitude b) { return a.log_ == b.log_; }

  /// Compare against an ordinary double: x <= *this.
  bool bounds(double x) const {
    if (x <= 0.0) return true;
    if (!representable()) return true;
    return x <= value();
  }

 private:
  double log_ = -std::numeric_limits<double>::infinity();
};

inline Magnitude max(Magnitude a, Magnitude b) { return a < b ? b : a; }

/// A nonnegative integer result of a threshold search. Small results are
/// exact; results beyond 2^62 are only known through their logarithm.
struct Count {
  std::optional<std::uint64_t> exact;
  Magnitude magnitude;

  static Count of(std::uint64_t v) {
    return Count{v, Magnitude::from_value(static_cast<double>(v))};
  }
  static Count approximate(Magnitude m) { return Count{std::nullopt, m}; }

  bool is_exact() const noexcept { return exact.has_value(); }
  double value() const noexcept {
    return exact ? static_cast<double>(*exact) : magnitude.value();
  }
  std::string to_string() const {
    return exact ? std::to_string(*exact) : "~" + magnitude.to_string();
  }
};

inline constexpr double kEulerGamma = 0.57721566490153286060651209;
inline constexpr double kPi = 3.14159265358979323846264338;

}  // namespace effdio
