#pragma once

// Exact integer primitives: totient sieves, restricted totients and divisor
// counts, nearest-integer distances for fixed-point and rational points, and
// the real zeta function.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "effdio/core.hpp"

namespace effdio {

using u128 = unsigned __int128;

// ---------------------------------------------------------------------------
// Totients

/// phi(q) for 1 <= q <= limit. Index 0 is unused and holds 0.
class PhiTable {
 public:
  /// Linear sieve up to 1e8, segmented sieve above that.
  static PhiTable sieve(std::uint64_t limit) {
    require(limit >= 1, "euler_phi_sieve: limit must be >= 1");
    require(limit < (std::uint64_t{1} << 32), "euler_phi_sieve: limit must be < 2^32");
    PhiTable t;
    t.values_ = limit <= kLinearLimit ? linear(limit) : segmented(limit);
    return t;
  }

  std::uint64_t limit() const noexcept { return values_.size() - 1; }
  std::uint32_t operator[](std::uint64_t q) const noexcept { return values_[q]; }
  std::uint32_t at(std::uint64_t q) const {
    if (!(q >= 1 && q <= limit()))
      throw DomainError("PhiTable: q=" + std::to_string(q) +
                        " outside sieve limit " + std::to_string(limit()));
    return values_[q];
  }

  /// phi over [lo, hi) by segment; independent of the linear sieve path.
  static std::vector<std::uint32_t> segment(std::uint64_t lo, std::uint64_t hi,
                                            const std::vector<std::uint32_t>& primes) {
    std::vector<std::uint32_t> phi(hi - lo);
    std::vector<std::uint64_t> rest(hi - lo);
    for (std::uint64_t i = lo; i < hi; ++i) {
      phi[i - lo] = static_cast<std::uint32_t>(i);
      rest[i - lo] = i;
    }
    for (std::uint64_t p : primes) {
      if (p * p >= hi) break;
      for (std::uint64_t m = std::max(p, (lo + p - 1) / p) * p; m < hi; m += p) {
        auto& r = rest[m - lo];
        phi[m - lo] = phi[m - lo] / p * (p - 1);
        while (r % p == 0) r /= p;
      }
    }
    for (std::uint64_t i = lo; i < hi; ++i) {
      const std::uint64_t r = rest[i - lo];
      if (r > 1) phi[i - lo] = static_cast<std::uint32_t>(phi[i - lo] / r * (r - 1));
    }
    return phi;
  }

  static std::vector<std::uint32_t> primes_upto(std::uint64_t n) {
    std::vector<bool> comp(n + 1, false);
    std::vector<std::uint32_t> out;
    for (std::uint64_t i = 2; i <= n; ++i) {
      if (comp[i]) continue;
      out.push_back(static_cast<std::uint32_t>(i));
      for (std::uint64_t j = i * i; j <= n; j += i) comp[j] = true;
    }
    return out;
  }

 private:
  static constexpr std::uint64_t kLinearLimit = 100'000'000;

  static std::vector<std::uint32_t> linear(std::uint64_t limit) {
    std::vector<std::uint32_t> phi(limit + 1, 0);
    std::vector<std::uint32_t> primes;
    phi[1] = 1;
    for (std::uint64_t i = 2; i <= limit; ++i) {
      if (phi[i] == 0) {
        phi[i] = static_cast<std::uint32_t>(i - 1);
        primes.push_back(static_cast<std::uint32_t>(i));
      }
      for (std::uint64_t p : primes) {
        const std::uint64_t m = p * i;
        if (m > limit) break;
        if (i % p == 0) {
          phi[m] = static_cast<std::uint32_t>(phi[i] * p);
          break;
        }
        phi[m] = static_cast<std::uint32_t>(phi[i] * (p - 1));
      }
    }
    return phi;
  }

  static std::vector<std::uint32_t> segmented(std::uint64_t limit) {
    const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit))) + 2;
    const auto primes = primes_upto(root);
    std::vector<std::uint32_t> phi(limit + 1, 0);
    constexpr std::uint64_t kSeg = 1 << 22;
    for (std::uint64_t lo = 1; lo <= limit; lo += kSeg) {
      const std::uint64_t hi = std::min(limit + 1, lo + kSeg);
      auto part = segment(lo, hi, primes);
      std::copy(part.begin(), part.end(), phi.begin() + static_cast<std::ptrdiff_t>(lo));
    }
    return phi;
  }

  std::vector<std::uint32_t> values_;
};

inline PhiTable euler_phi_sieve(std::uint64_t limit) { return PhiTable::sieve(limit); }

/// Prime factorisation by trial division, as (prime, exponent) pairs.
inline std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, unsigned>> f;
  for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p) continue;
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    f.emplace_back(p, e);
  }
  if (n > 1) f.emplace_back(n, 1);
  return f;
}

/// Visits each divisor d of n together with phi(n / d).
template <class Visitor>
void for_each_divisor_with_cototient(std::uint64_t n, Visitor&& visit) {
  const auto f = factorize(n);
  std::vector<unsigned> e(f.size(), 0);
  while (true) {
    std::uint64_t d = 1, phi_cofactor = 1;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto [p, ei] = f[i];
      for (unsigned j = 0; j < e[i]; ++j) d *= p;
      const unsigned rest = ei - e[i];
      if (rest > 0) {
        std::uint64_t pk = 1;
        for (unsigned j = 1; j < rest; ++j) pk *= p;
        phi_cofactor *= pk * (p - 1);
      }
    }
    visit(d, phi_cofactor);
    std::size_t i = 0;
    for (; i < f.size(); ++i) {
      if (e[i] < f[i].second) {
        ++e[i];
        break;
      }
      e[i] = 0;
    }
    if (i == f.size()) return;
  }
}

/// #{1 <= m <= n : gcd(m, n) <= k}.
inline std::uint64_t restricted_totient(std::uint64_t k, std::uint64_t n) {
  require(k >= 1 && n >= 1, "restricted_totient: k and n must be >= 1");
  if (k >= n) return n;
  // gcd(m, n) = d exactly phi(n/d) times.
  std::uint64_t count = 0;
  for_each_divisor_with_cototient(n, [&](std::uint64_t d, std::uint64_t phi_nd) {
    if (d <= k) count += phi_nd;
  });
  return count;
}

/// Real-bound variant: gcd(m, n) <= bound for a real bound >= 0.
inline std::uint64_t restricted_totient_real(double bound, std::uint64_t n) {
  require(n >= 1, "restricted_totient: n must be >= 1");
  if (!(bound >= 1.0)) return 0;
  if (bound >= static_cast<double>(n)) return n;
  return restricted_totient(static_cast<std::uint64_t>(std::floor(bound)), n);
}

/// #{d | n : 1 <= d <= bound}.
inline std::uint64_t restricted_divisor_count(std::uint64_t n, double bound) {
  require(n >= 1, "restricted_divisor_count: n must be >= 1");
  std::uint64_t count = 0;
  for (std::uint64_t d = 1; d * d <= n; ++d) {
    if (n % d) continue;
    if (static_cast<double>(d) <= bound) ++count;
    const std::uint64_t e = n / d;
    if (e != d && static_cast<double>(e) <= bound) ++count;
  }
  return count;
}

// ---------------------------------------------------------------------------
// Nearest-integer distance

namespace detail {

// Thresholds are expressed so that a distance D (in units of 2^-128) satisfies
// the inequality iff D < T.
inline u128 scaled_threshold(double psi, int extra_shift, bool strict) {
  require(!std::isnan(psi), "approximation radius is NaN");
  constexpr u128 kMax = ~u128{0};
  if (psi <= 0.0) return (psi == 0.0 && !strict) ? 1 : 0;
  if (std::isinf(psi)) return kMax;
  const auto bits = std::bit_cast<std::uint64_t>(psi);
  const int biased = static_cast<int>((bits >> 52) & 0x7ff);
  std::uint64_t m = bits & ((std::uint64_t{1} << 52) - 1);
  int e;
  if (biased == 0) {
    e = -1074;
  } else {
    m |= std::uint64_t{1} << 52;
    e = biased - 1075;
  }
  const int shift = e + extra_shift;  // value * 2^extra = m * 2^shift
  if (shift >= 0) {
    if (shift + 53 > 127) return kMax;
    const u128 exact = u128{m} << shift;
    return strict ? exact : exact + 1;
  }
  const int s = -shift;
  u128 floor_v = 0;
  bool has_frac;
  if (s >= 64) {
    floor_v = 0;
    has_frac = m != 0;
  } else {
    floor_v = m >> s;
    has_frac = (m & ((std::uint64_t{1} << s) - 1)) != 0;
  }
  return strict ? floor_v + (has_frac ? 1 : 0) : floor_v + 1;
}

}  // namespace detail

/// A point x in [0, 1) held as a 0.128 unsigned fixed-point fraction.
/// q*x mod 1 is computed exactly for the stored value; the only error is the
/// representation error of x itself, below 2^-128 per unit of q.
class FixedPointFraction {
 public:
  constexpr FixedPointFraction() = default;
  static constexpr FixedPointFraction from_bits(u128 bits) {
    FixedPointFraction f;
    f.bits_ = bits;
    return f;
  }
  /// Exact for every double in [0, 1).
  static FixedPointFraction from_double(double x) {
    require(x >= 0.0 && x < 1.0, "FixedPointFraction: x must lie in [0,1)");
    if (x == 0.0) return {};
    int e;
    const double mant = std::frexp(x, &e);  // x = mant * 2^e, mant in [0.5,1)
    const auto m = static_cast<std::uint64_t>(std::ldexp(mant, 53));
    const int shift = 128 - 53 + e;
    return from_bits(shift >= 0 ? u128{m} << shift : u128{m} >> -shift);
  }
  /// floor(num/den * 2^128) / 2^128; num is reduced mod den.
  static FixedPointFraction from_rational(std::uint64_t num, std::uint64_t den) {
    require(den >= 1, "FixedPointFraction: zero denominator");
    u128 r = num % den;
    u128 bits = 0;
    for (int i = 0; i < 128; ++i) {
      r <<= 1;
      bits <<= 1;
      if (r >= den) {
        r -= den;
        bits |= 1;
      }
    }
    return from_bits(bits);
  }

  constexpr u128 bits() const noexcept { return bits_; }
  double to_double() const noexcept {
    return std::ldexp(static_cast<double>(bits_), -128);
  }

  /// Fractional part of q*x in units of 2^-128.
  constexpr u128 frac_times(std::uint64_t q) const noexcept { return bits_ * q; }
  /// Integer part of q*x.
  std::uint64_t floor_times(std::uint64_t q) const noexcept {
    const u128 lo = static_cast<std::uint64_t>(bits_);
    const u128 hi = static_cast<std::uint64_t>(bits_ >> 64);
    const u128 a = hi * q + ((lo * q) >> 64);
    return static_cast<std::uint64_t>(a >> 64);
  }

  static constexpr u128 dist_bits(u128 frac) noexcept {
    const u128 neg = -frac;
    return frac < neg ? frac : neg;
  }

  /// ||q x|| < psi, decided exactly against the stored value.
  bool dist_less(std::uint64_t q, double psi) const {
    return dist_bits(frac_times(q)) < detail::scaled_threshold(psi, 128, true);
  }
  /// ||q x - gamma|| <= psi.
  bool dist_shift_leq(std::uint64_t q, const FixedPointFraction& gamma, double psi) const {
    return dist_bits(frac_times(q) - gamma.bits_) < detail::scaled_threshold(psi, 128, false);
  }
  double distance(std::uint64_t q) const noexcept {
    return std::ldexp(static_cast<double>(dist_bits(frac_times(q))), -128);
  }

  /// Nearest integers to q x: one, or two when q x is a half-integer.
  std::pair<std::uint64_t, std::optional<std::uint64_t>> nearest(std::uint64_t q) const {
    const u128 f = frac_times(q);
    const std::uint64_t fl = floor_times(q);
    constexpr u128 half = u128{1} << 127;
    if (f < half) return {fl, std::nullopt};
    if (f > half) return {fl + 1, std::nullopt};
    return {fl, fl + 1};
  }

  friend bool operator==(const FixedPointFraction&, const FixedPointFraction&) = default;

 private:
  u128 bits_ = 0;
};

/// Exact rational point x = num/den (num may exceed den; only x mod 1 matters
/// for distances, but nearest() reports integers for num/den as given).
class RationalPoint {
 public:
  RationalPoint(std::uint64_t num, std::uint64_t den) : num_(num), den_(den) {
    require(den >= 1, "RationalPoint: zero denominator");
    const std::uint64_t g = std::gcd(num, den);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }
  std::uint64_t num() const noexcept { return num_; }
  std::uint64_t den() const noexcept { return den_; }
  double to_double() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  /// q*num mod den.
  std::uint64_t residue(std::uint64_t q) const noexcept {
    return static_cast<std::uint64_t>((u128{q % den_} * (num_ % den_)) % den_);
  }
  /// Numerator of ||q x|| over den.
  std::uint64_t dist_num(std::uint64_t q) const noexcept {
    const std::uint64_t r = residue(q);
    return std::min(r, den_ - r);
  }

  bool dist_less(std::uint64_t q, double psi) const {
    return ratio_compare(dist_num(q), den_, psi, true);
  }
  /// ||q x - gamma|| <= psi with rational gamma.
  bool dist_shift_leq(std::uint64_t q, const RationalPoint& gamma, double psi) const {
    const u128 d = u128{den_} * gamma.den_;
    require(d < (u128{1} << 63), "RationalPoint: combined denominator too large");
    const auto D = static_cast<std::uint64_t>(d);
    const u128 a = (u128{q % D} * ((u128{num_ % den_} * gamma.den_) % D)) % D;
    const u128 g = (u128{gamma.num_ % gamma.den_} * den_) % D;
    const auto r = static_cast<std::uint64_t>((a + D - g) % D);
    return ratio_compare(std::min(r, D - r), D, psi, false);
  }
  double distance(std::uint64_t q) const noexcept {
    return static_cast<double>(dist_num(q)) / static_cast<double>(den_);
  }

  std::pair<std::uint64_t, std::optional<std::uint64_t>> nearest(std::uint64_t q) const {
    const u128 prod = u128{q} * num_;
    const auto fl = static_cast<std::uint64_t>(prod / den_);
    const auto r = static_cast<std::uint64_t>(prod % den_);
    const u128 twice = u128{r} * 2;
    if (twice < den_) return {fl, std::nullopt};
    if (twice > den_) return {fl + 1, std::nullopt};
    return {fl, fl + 1};
  }

  /// a/b < psi (strict) or a/b <= psi, decided exactly. Requires a <= b.
  static bool ratio_compare(std::uint64_t a, std::uint64_t b, double psi, bool strict) {
    require(!std::isnan(psi), "approximation radius is NaN");
    if (psi <= 0.0) return !strict && psi == 0.0 && a == 0;
    if (psi >= 1.0) return true;
    int e;
    const double mant = std::frexp(psi, &e);
    const auto m = static_cast<std::uint64_t>(std::ldexp(mant, 53));  // psi = m*2^(e-53)
    const int s = 53 - e;  // > 0
    const u128 rhs = u128{m} * b;  // compare a * 2^s against rhs
    if (s <= 63) {
      const u128 lhs = u128{a} << s;
      return strict ? lhs < rhs : lhs <= rhs;
    }
    // a < rhs / 2^s  <=>  a < ceil(rhs / 2^s);  a <= rhs/2^s <=> a <= floor(rhs/2^s)
    const u128 fl = s >= 128 ? 0 : rhs >> s;
    const bool frac = s >= 128 ? rhs != 0 : (rhs & ((u128{1} << s) - 1)) != 0;
    return strict ? u128{a} < fl + (frac ? 1 : 0) : u128{a} <= fl;
  }

 private:
  std::uint64_t num_;
  std::uint64_t den_;
};

/// ||q x|| for a fixed-point x, in [0, 1/2].
inline double nearest_int_distance(const FixedPointFraction& x, std::uint64_t q) {
  return x.distance(q);
}
inline double nearest_int_distance(const RationalPoint& x, std::uint64_t q) {
  return x.distance(q);
}

// ---------------------------------------------------------------------------
// Zeta

/// zeta(s) for real s > 1.01 by Euler-Maclaurin summation with a certified
/// remainder bound: |result - zeta(s)| <= tol.
inline double zeta(double s, double tol = 1e-13) {
  require(s > 1.01, "zeta: argument " + std::to_string(s) +
                        " too close to the pole (margin requires s > 1.01)");
  require(tol >= 1e-15, "zeta: tolerance below 1e-15 cannot be certified in double");
  // B_{2k} for k = 1..11
  static constexpr std::array<double, 11> kBernoulli = {
      1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730,
      7.0 / 6, -3617.0 / 510, 43867.0 / 798, -174611.0 / 330, 854513.0 / 138};
  if (s > 60.0) {
    // Terms beyond 2^-s are below 3^-60 ~ 2e-29 relative.
    return 1.0 + std::exp2(-s) + std::pow(3.0, -s);
  }
  for (std::uint64_t n0 = 10;; n0 *= 2) {
    const double N = static_cast<double>(n0);
    // Euler-Maclaurin correction terms.
    std::array<double, 11> terms{};
    double rising = s;  // s (s+1) ... (s+2k-2)
    double fact = 2.0;  // (2k)!
    double npow = std::pow(N, -s - 1.0);
    for (std::size_t k = 0; k < terms.size(); ++k) {
      terms[k] = kBernoulli[k] / fact * rising * npow;
      rising *= (s + 2.0 * k + 1.0) * (s + 2.0 * k + 2.0);
      fact *= (2.0 * k + 3.0) * (2.0 * k + 4.0);
      npow /= N * N;
    }
    // Use m terms; bound the remainder by |term m+1|.
    for (std::size_t m = 1; m + 1 < terms.size(); ++m) {
      if (std::fabs(terms[m]) > tol / 4) continue;
      CompensatedSum acc;
      for (std::uint64_t n = n0 - 1; n >= 1; --n) acc += std::pow(static_cast<double>(n), -s);
      acc += std::pow(N, 1.0 - s) / (s - 1.0);
      acc += 0.5 * std::pow(N, -s);
      for (std::size_t k = 0; k < m; ++k) acc += terms[k];
      return acc.value();
    }
  }
}

}  // namespace effdio
