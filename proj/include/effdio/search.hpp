#pragma once

// Threshold searches over non-decreasing integer-indexed functions, exact on
// a finite prefix and continued in log-space beyond it.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "effdio/core.hpp"

namespace effdio {

/// A non-decreasing function of n >= 1.
struct MonotoneFunction {
  std::function<Magnitude(std::uint64_t)> at;
  /// Largest n at which `at` may be called.
  std::uint64_t exact_limit = 0;
  /// Value at n = exp(L) for L > log(exact_limit); empty when no tail model.
  std::function<std::optional<Magnitude>(double)> at_log;
};

struct SearchOutcome {
  /// First n meeting the threshold; empty when not reached anywhere the
  /// function is known.
  std::optional<Count> n;
  /// True when n came from the log-space continuation.
  bool asymptotic = false;
};

/// First n >= 1 with f(n) > T (strict) or f(n) >= T.
inline SearchOutcome first_reaching(const MonotoneFunction& f, Magnitude T, bool strict) {
  require(f.exact_limit >= 1, "search: empty exact range");
  auto meets = [&](Magnitude v) { return strict ? v > T : v >= T; };
  // Exponential phase on the exact prefix.
  std::uint64_t lo = 0, hi = 1;
  while (!meets(f.at(hi))) {
    lo = hi;
    if (hi == f.exact_limit) {
      hi = 0;
      break;
    }
    hi = hi > f.exact_limit / 2 ? f.exact_limit : hi * 2;
  }
  if (hi != 0) {
    while (hi - lo > 1) {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      (meets(f.at(mid)) ? hi : lo) = mid;
    }
    return {Count::of(hi), false};
  }
  if (!f.at_log) return {};
  // Log-space phase: bisection on L = log n.
  double l_lo = std::log(static_cast<double>(f.exact_limit));
  double l_hi = std::max(2.0 * l_lo, l_lo + 1.0);
  constexpr double kMaxLog = 1e300;
  while (true) {
    const auto v = f.at_log(l_hi);
    if (!v) return {};
    if (meets(*v)) break;
    l_lo = l_hi;
    if (l_hi >= kMaxLog)
      throw UnboundedError("threshold beyond log-space range (n > exp(1e300))");
    l_hi = std::min(kMaxLog, l_hi * 4.0);
  }
  for (int i = 0; i < 200 && l_hi - l_lo > 1e-12 * l_hi; ++i) {
    const double mid = 0.5 * (l_lo + l_hi);
    const auto v = f.at_log(mid);
    (v && meets(*v) ? l_hi : l_lo) = mid;
  }
  return {Count::approximate(Magnitude::from_log(l_hi)), true};
}

}  // namespace effdio
