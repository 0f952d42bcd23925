#pragma once

// Explicit constants of the effective counting theorems and the assembled
// right-hand sides they bound deviations by.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "effdio/core.hpp"
#include "effdio/numtheory.hpp"
#include "effdio/psi.hpp"
#include "effdio/search.hpp"

namespace effdio {

/// One reported quantity: a plain number when representable, text otherwise.
struct Output {
  std::string name;
  std::optional<double> number;
  std::string text;

  static Output of(std::string name, double v) {
    return {std::move(name), v, detail::format_number(v)};
  }
  static Output of(std::string name, Magnitude m) {
    if (m.representable() && !m.is_infinite()) return {std::move(name), m.value(), m.to_string()};
    return {std::move(name), std::nullopt, m.to_string()};
  }
  static Output of(std::string name, const Count& c) {
    if (c.exact) return {std::move(name), static_cast<double>(*c.exact), c.to_string()};
    return of(std::move(name), c.magnitude);
  }
  static Output text_only(std::string name, std::string text) {
    return {std::move(name), std::nullopt, std::move(text)};
  }
};

struct ConstantsBundle {
  std::string theorem;
  std::vector<Output> inputs;
  std::vector<Output> outputs;
  std::vector<std::string> warnings;
};

namespace detail {

inline void check_eps_delta(double eps, double delta) {
  require(eps > 0.0 && std::isfinite(eps), "eps must be positive");
  require(delta > 0.0 && std::isfinite(delta), "delta must be positive");
}

/// ceil(m) + 1, exact while m fits in 53 bits.
inline Count ceil_plus_one(Magnitude m) {
  if (m.representable() && m.value() < 9.0e15)
    return Count::of(static_cast<std::uint64_t>(std::ceil(m.value())) + 1);
  return Count::approximate(m);
}

/// (base)^(1/eps) for a positive magnitude base.
inline Magnitude root(Magnitude base, double eps) {
  if (base.representable() && base.value() > 0.0) {
    const double v = std::pow(base.value(), 1.0 / eps);
    if (std::isfinite(v) && v > 0.0) return Magnitude::from_value(v);
  }
  return base.pow(1.0 / eps);
}

inline Magnitude count_magnitude(const Count& c) { return c.magnitude; }

/// max(log x, 0)
inline double log_plus(double x) { return x > 1.0 ? std::log(x) : 0.0; }

/// log(x)^p for x >= 1; the base is clamped at 0 for x < 1.
inline double log_pow(double x, double p) { return std::pow(log_plus(x), p); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Effective Schmidt bound

/// K_eps = (28 + 858 (eps+1) 7^eps) / (psi(1)^(1/2) log^(2+eps)(psi(1)+1))
inline Magnitude schmidt_K(double eps, double psi1) {
  require(eps > 0.0, "eps must be positive");
  require(psi1 > 0.0, "psi(1) must be positive (K_eps divides by psi(1)^(1/2))");
  const Magnitude num = Magnitude::from_value(28.0) +
                        Magnitude::from_log(std::log(858.0 * (eps + 1.0)) + eps * std::log(7.0));
  const Magnitude den =
      Magnitude::from_log(0.5 * std::log(psi1) + (2.0 + eps) * std::log(std::log1p(psi1)));
  return num / den;
}

/// 44 Psi log(3 Psi^2 + 3) log(2 log(3 Psi^2 + 3)) as a function of Psi.
inline Magnitude schmidt_growth(Magnitude Psi) {
  if (Psi.is_zero()) return Magnitude::zero();
  const double lp = Psi.log();
  const double log_sq1 = lp > 20.0 ? 2.0 * lp : std::log1p(std::exp(2.0 * lp));
  const double L = std::log(3.0) + log_sq1;
  return Magnitude::from_log(std::log(44.0) + lp + std::log(L) + std::log(std::log(2.0 * L)));
}

struct SchmidtConstants {
  double eps = 0, delta = 0;
  Magnitude K;
  /// ceil((2 K / (eps delta))^(1/eps)) + 1
  Count threshold;
  /// N_{eps,delta} = 2 max{n : threshold > growth(Psi(n))}, 0 for an empty set.
  Count N;
  bool N_asymptotic = false;
  std::vector<std::string> warnings;

  ConstantsBundle bundle(const std::string& psi_spec) const {
    return {"est",
            {Output::of("eps", eps), Output::of("delta", delta), Output::text_only("psi", psi_spec)},
            {Output::of("K_eps", K), Output::of("threshold", threshold),
             Output::of("N_eps_delta", N)},
            warnings};
  }
};

/// Phi(n) = sum_{k<=n} phi(k): exact up to 2^22, then the family's tail model.
inline MonotoneFunction partial_sums(const ApproxFunction& phi) {
  constexpr std::uint64_t kExact = std::uint64_t{1} << 22;
  auto cache = std::make_shared<AggregateCache>(phi);
  MonotoneFunction f;
  f.exact_limit = std::min(kExact, phi.domain_limit());
  f.at = [cache](std::uint64_t n) { return Magnitude::from_value(cache->psi_sum(n)); };
  if (phi.has_tail_model() && phi.divergent())
    f.at_log = [phi](double L) { return phi.asymptotic_sum(L); };
  return f;
}

inline SchmidtConstants est_constants(double eps, double delta, const ApproxFunction& psi) {
  detail::check_eps_delta(eps, delta);
  SchmidtConstants c;
  c.eps = eps;
  c.delta = delta;
  c.warnings = validate_schmidt(psi);
  c.K = schmidt_K(eps, psi(1));
  const Magnitude base = Magnitude::from_value(2.0) * c.K / Magnitude::from_value(eps * delta);
  c.threshold = detail::ceil_plus_one(detail::root(base, eps));

  constexpr std::uint64_t kExact = std::uint64_t{1} << 22;
  auto cache = std::make_shared<AggregateCache>(psi);
  MonotoneFunction g;
  g.exact_limit = std::min(kExact, psi.domain_limit());
  g.at = [cache](std::uint64_t n) {
    return schmidt_growth(Magnitude::from_value(cache->psi_sum(n)));
  };
  if (psi.has_tail_model() && psi.divergent()) {
    g.at_log = [&psi](double L) -> std::optional<Magnitude> {
      const auto s = psi.asymptotic_sum(L);
      if (!s) return std::nullopt;
      return schmidt_growth(*s);
    };
  }
  SearchOutcome first;
  try {
    first = first_reaching(g, c.threshold.magnitude, false);
  } catch (const UnboundedError&) {
    if (!psi.divergent()) throw;
    c.N = Count::approximate(Magnitude::infinite());
    c.N_asymptotic = true;
    c.warnings.push_back("N_eps_delta exceeds exp(1e300); every bound is infinite");
    return c;
  }
  if (!first.n)
    throw UnboundedError("N_eps_delta unbounded: Psi(n) does not reach the threshold on the " +
                         std::string(psi.divergent() ? "computable range" : "non-divergent psi"));
  c.N_asymptotic = first.asymptotic;
  if (first.n->exact) {
    c.N = Count::of(2 * (*first.n->exact - 1));
  } else {
    c.N = Count::approximate(Magnitude::from_value(2.0) * first.n->magnitude);
    c.warnings.push_back("N_eps_delta from log-space continuation of Psi; approximate");
  }
  return c;
}

/// max(N_{eps,delta}, K_eps Psi^(1/2) log^(2+eps)(Psi + 1))
inline Magnitude schmidt_bound(const SchmidtConstants& c, double Psi) {
  const Magnitude growth =
      Psi <= 0.0 ? Magnitude::zero()
                 : c.K * Magnitude::from_log(0.5 * std::log(Psi) +
                                             (2.0 + c.eps) * std::log(std::log1p(Psi)));
  return max(c.N.magnitude, growth);
}

// ---------------------------------------------------------------------------
// Variance-to-counting constants

/// Second branch of K_{eps,delta} in the Phi^(2/3) form.
inline double thm2_branch2(double eps, double Phi0) {
  const double l3 = std::log(3.0), l4 = std::log(4.0);
  return 4.0 / std::pow(std::log(Phi0 + 2.0), 2.0 * eps / 3.0) * std::pow(l4 / l3, 1.0 + eps) *
         (4.0 + (1.0 + eps) / l3 + 1.0 / (4.0 * std::pow(l4, 1.0 + eps)));
}

struct Thm2Constants {
  double eps = 0, delta = 0, K = 0, Phi0 = 0, C = 0;
  Count j;
  Magnitude threshold;  // j^3 log^(1+eps)(j+2)
  Count N;
  bool N_asymptotic = false;
  Magnitude K_branch1, K_branch2, K_eps_delta;
  std::vector<std::string> warnings;

  std::vector<Output> outputs() const {
    return {Output::of("j_eps_delta", j), Output::of("threshold", threshold),
            Output::of("N_eps_delta", N), Output::of("K_branch1", K_branch1),
            Output::of("K_branch2", K_branch2), Output::of("K_eps_delta", K_eps_delta)};
  }
};

/// j = 1 + ceil(exp(X^(1/eps))) with X = (1 + log^(-1-eps) 3) K / (eps delta).
inline Count thm2_j(double eps, double delta, double K) {
  detail::check_eps_delta(eps, delta);
  require(K > 0.0, "K must be positive");
  const double X = (1.0 + std::pow(std::log(3.0), -1.0 - eps)) * K / (eps * delta);
  const double log_inner = std::log(X) / eps;  // log of X^(1/eps)
  if (log_inner > std::log(700.0))
    throw UnboundedError("j_eps_delta astronomically large: log log j = " +
                         detail::format_number(log_inner));
  const double inner = std::exp(log_inner);
  return detail::ceil_plus_one(Magnitude::from_log(inner));
}

/// Phi must be non-decreasing; N = min{n : Phi(n) > threshold}.
inline Thm2Constants thm2_constants(double eps, double delta, double K, double Phi0, double C,
                                    const MonotoneFunction& Phi) {
  require(Phi0 > 0.0 && C > 0.0, "Phi0 and C must be positive");
  Thm2Constants c;
  c.eps = eps;
  c.delta = delta;
  c.K = K;
  c.Phi0 = Phi0;
  c.C = C;
  c.j = thm2_j(eps, delta, K);
  const double lj = c.j.magnitude.log();
  const double log_j2 = lj > 40.0 ? lj : std::log(c.j.value() + 2.0);
  c.threshold = Magnitude::from_log(3.0 * lj + (1.0 + eps) * std::log(log_j2));
  const auto first = first_reaching(Phi, c.threshold, true);
  if (!first.n) throw UnboundedError("N_eps_delta unbounded: Phi never exceeds j^3 log^(1+eps)(j+2)");
  c.N = *first.n;
  c.N_asymptotic = first.asymptotic;
  const double den = std::max(std::pow(Phi0, 2.0 / 3.0) * std::pow(std::log(Phi0 + 2.0), 1.0 / 3.0 + eps), 1.0);
  c.K_branch1 = Magnitude::from_value(C) * c.N.magnitude / Magnitude::from_value(den);
  c.K_branch2 = Magnitude::from_value(thm2_branch2(eps, Phi0));
  c.K_eps_delta = max(c.K_branch1, c.K_branch2);
  return c;
}

/// K Phi^(2/3) log^(1/3+eps)(Phi + 2)
inline Magnitude thm2_bound(const Thm2Constants& c, double Phi) {
  if (Phi <= 0.0) return Magnitude::zero();
  return c.K_eps_delta * Magnitude::from_log(2.0 / 3.0 * std::log(Phi) +
                                             (1.0 / 3.0 + c.eps) * std::log(std::log(Phi + 2.0)));
}

/// Second branch of K_{eps,delta} in the Phi^(1/2) form; independent of delta.
inline double thm3_branch2(double eps) {
  const double l2 = std::log(2.0), l3 = std::log(3.0), l4 = std::log(4.0);
  return 2.0 / std::pow(l2, 1.5 + eps / 2.0) *
         (1.0 + 1.0 / (std::sqrt(2.0) * std::pow(l4, 1.5 + eps))) * std::pow(l4 / l3, 1.5 + eps);
}

/// r = ceil((2 K / (eps delta))^(1/eps)) + 1
inline Count thm3_r(double eps, double delta, double K) {
  detail::check_eps_delta(eps, delta);
  require(K > 0.0, "K must be positive");
  return detail::ceil_plus_one(detail::root(Magnitude::from_value(2.0 * K / (eps * delta)), eps));
}

struct Thm3Constants {
  double eps = 0, delta = 0, K = 0, Phi0 = 0, C = 0, f1 = 0;
  Count r;
  Count N;
  bool N_truncated = false;
  Magnitude K_branch1, K_branch2, K_eps_delta;
  std::vector<std::string> warnings;

  std::vector<Output> outputs() const {
    return {Output::of("r_eps_delta", r), Output::of("N_eps_delta", N),
            Output::of("K_branch1", K_branch1), Output::of("K_branch2", K_branch2),
            Output::of("K_eps_delta", K_eps_delta)};
  }
};

/// N = max{n : Phi(n) < r}. When Phi stays below r on everything known and
/// `allow_truncation` is set, N is cut at the known range with a warning.
inline Thm3Constants thm3_constants(double eps, double delta, double K, double Phi0, double C,
                                    double f1, const MonotoneFunction& Phi,
                                    bool allow_truncation = false) {
  require(Phi0 > 0.0 && C > 0.0 && f1 >= 0.0, "Phi0, C must be positive and f1 >= 0");
  Thm3Constants c;
  c.eps = eps;
  c.delta = delta;
  c.K = K;
  c.Phi0 = Phi0;
  c.C = C;
  c.f1 = f1;
  c.r = thm3_r(eps, delta, K);
  const auto first = first_reaching(Phi, c.r.magnitude, false);
  if (first.n) {
    c.N = first.n->exact ? Count::of(*first.n->exact - 1) : *first.n;
  } else if (allow_truncation) {
    c.N = Count::of(Phi.exact_limit);
    c.N_truncated = true;
    c.warnings.push_back("Phi stays below r_eps_delta on n <= " + std::to_string(Phi.exact_limit) +
                         "; N_eps_delta truncated to the probed range");
  } else {
    throw UnboundedError("N_eps_delta unbounded: Phi never reaches r_eps_delta");
  }
  const double den = std::max(
      std::sqrt(Phi0) * std::pow(std::log(Phi0 + 2.0), 1.5 + eps) + f1, 1.0);
  c.K_branch1 = Magnitude::from_value(C) * c.N.magnitude / Magnitude::from_value(den);
  c.K_branch2 = Magnitude::from_value(thm3_branch2(eps));
  c.K_eps_delta = max(c.K_branch1, c.K_branch2);
  return c;
}

/// K (Phi^(1/2) log^(3/2+eps) Phi + max f)
inline Magnitude thm3_bound(const Thm3Constants& c, double Phi, double max_f) {
  const double g = Phi > 0.0 ? std::sqrt(Phi) * detail::log_pow(Phi, 1.5 + c.eps) : 0.0;
  return c.K_eps_delta * Magnitude::from_value(g + max_f);
}

// ---------------------------------------------------------------------------
// Solution counting with coprimality

namespace detail {
inline long double abh_f(long double k, double C, double calC) {
  const long double s = std::sqrt(static_cast<long double>(C));
  return calC * std::pow(k, -s / 2) * (1 + 2 * k / (s - 2));
}
}  // namespace detail

/// k_{C,delta} = min{k : calC k^(-sqrt(C)/2) (1 + 2k/(sqrt(C)-2)) < delta}
inline Count abh_k(double C, double delta, double calC) {
  require(C > 4.0, "C must exceed 4 (sqrt(C) - 2 appears as a denominator)");
  require(delta > 0.0, "delta must be positive");
  require(calC > 0.0, "the variance constant must be positive");
  auto ok = [&](long double k) { return detail::abh_f(k, C, calC) < delta; };
  constexpr std::uint64_t kScan = 1 << 20;
  for (std::uint64_t k = 1; k <= kScan; ++k)
    if (ok(static_cast<long double>(k))) return Count::of(k);
  std::uint64_t lo = kScan, hi = kScan;
  while (!ok(static_cast<long double>(hi))) {
    lo = hi;
    if (hi > (std::uint64_t{1} << 61)) {
      // Beyond integer range: solve in log space. f ~ calC (2/(s-2)) k^(1-s/2).
      const double s = std::sqrt(C);
      const double logk = (std::log(calC) + std::log(2.0 / (s - 2.0)) - std::log(delta)) /
                          (s / 2.0 - 1.0);
      return Count::approximate(Magnitude::from_log(logk));
    }
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (ok(static_cast<long double>(mid)) ? hi : lo) = mid;
  }
  return Count::of(hi);
}

/// max{k/2, (2e Psi' + 1)/(log Psi')^C + 1/2}; the second branch only for Psi' > e.
inline Magnitude abh_bound(const Count& k, double psi_prime, double C) {
  Magnitude b = k.magnitude / Magnitude::from_value(2.0);
  if (psi_prime > std::exp(1.0)) {
    const double second =
        (2.0 * std::exp(1.0) * psi_prime + 1.0) / std::pow(std::log(psi_prime), C) + 0.5;
    b = max(b, Magnitude::from_value(second));
  }
  return b;
}

// ---------------------------------------------------------------------------
// Inhomogeneous approximation along sequences

struct M0Params {
  double nu = 1.0 / kPi;
  double A = 6.0;
  double B = 1.0;
  double C = 0.5;  // growth: log q_n > C n^(1/B)
  double alpha = 0.5;
  double K0 = 2.0;
  double delta = 0.1;
};

struct ZetaCall {
  std::string label;
  double s;
  double value;
};

struct M0Constants {
  M0Params p;
  double K_prime = 0, c1 = 0, c2 = 0, c3 = 0, m1 = 0, m2 = 0;
  double K_lacunary = 0;   // 6 max(48, c1, c2)
  double K_separated = 0;  // 2 max(48, c3)
  // Printed closed forms for t_{1,delta}, t_{2,delta} with |1 - d| in place
  // of the negative base 1 - d.
  double t1_statement = 0, t1_derivation = 0, t2_statement = 0, t2_derivation = 0;
  std::vector<ZetaCall> zeta_calls;
  std::vector<std::string> warnings;

  std::vector<Output> outputs() const {
    return {Output::of("K_prime", K_prime),     Output::of("c1", c1),
            Output::of("c2", c2),               Output::of("c3", c3),
            Output::of("m1", m1),               Output::of("m2", m2),
            Output::of("K_lacunary", K_lacunary), Output::of("K_separated", K_separated),
            Output::of("t1_statement", t1_statement),
            Output::of("t1_derivation", t1_derivation),
            Output::of("t2_statement", t2_statement),
            Output::of("t2_derivation", t2_derivation)};
  }
};

/// 1/2 + (|1-d| delta / denom)^(1/(1-d))
inline double t_closed_form(double d, double delta, double denom) {
  return 0.5 + std::pow(std::fabs(1.0 - d) * delta / denom, 1.0 / (1.0 - d));
}

inline M0Constants m0_constants(const M0Params& p) {
  require(p.nu > 0.0, "nu must be positive");
  require(p.B >= 1.0, "B must be >= 1");
  require(p.A > 2.0 * p.B, "A must exceed 2B");
  require(p.C > 0.0, "growth constant C must be positive");
  require(p.alpha > 0.0 && p.alpha < 1.0, "alpha must lie in (0,1)");
  require(p.K0 > 1.0, "lacunary constant K0 must exceed 1");
  require(p.delta > 0.0, "delta must be positive");
  M0Constants c;
  c.p = p;
  auto z = [&](const std::string& label, double s) {
    if (!(s > 1.01))
      throw DomainError("zeta argument " + label + " = " + detail::format_number(s) + " for " +
                        (label.find("A/B") != std::string::npos || label == "A/(2B)" ? "c3/m1"
                                                                                     : "c2") +
                        " is not > 1.01");
    const double v = zeta(s, 1e-13);
    c.zeta_calls.push_back({label, s, v});
    return v;
  };
  const double A = p.A, B = p.B;
  const double nuCA = p.nu * std::pow(p.C, -A);
  const double alphaA = std::pow(p.alpha, -A);
  c.K_prime = 1.0 / (p.K0 - 1.0);
  c.c1 = 22.0 / (p.K0 - 1.0);
  c.c2 = 12.0 * (3.0 / std::cbrt(4.0) + 1.0) * (1.0 + z("A-1", A - 1.0)) + 8.0 / (p.K0 - 1.0) +
         18.0 * nuCA *
             (std::sqrt(2.0) * z("A-1/2", A - 0.5) * (2.0 + alphaA) +
              std::pow(2.0, A + 1.0) * z("A/2", A / 2.0));
  c.c3 = 4.0 +
         18.0 * nuCA *
             (std::sqrt(2.0) * z("A/B-1/2", A / B - 0.5) * (2.0 + alphaA) +
              std::pow(2.0, A + 1.0) * z("A/(2B)", A / (2.0 * B))) +
         c.c2;
  c.m1 = 3.0 + 3.0 * z("A/B-1", A / B - 1.0);
  c.m2 = 3.0 / std::cbrt(4.0);
  c.K_lacunary = 6.0 * std::max({48.0, c.c1, c.c2});
  c.K_separated = 2.0 * std::max(48.0, c.c3);
  const double ratio = p.nu / std::pow(p.C, A);
  const double d = std::min(9.0, A / B);
  c.t1_statement = t_closed_form(A, p.delta, 2.0 * (3.0 + ratio));
  c.t1_derivation = t_closed_form(A / B, p.delta, 3.0 + ratio);
  c.t2_statement = t_closed_form(d, p.delta, 2.0 * (1.0 + ratio));
  c.t2_derivation = t_closed_form(d, p.delta, 1.0 + ratio);
  c.warnings.push_back("t closed forms printed with base (1-d) < 0; evaluated with |1-d|");
  return c;
}

/// A summable weight with certified tail bounds on sum_{n >= M} omega(n).
struct Omega {
  std::string name;
  std::function<double(std::uint64_t)> at;
  std::function<double(std::uint64_t)> tail_upper;
  std::function<double(std::uint64_t)> tail_lower;
};

inline Omega omega_zero() {
  return {"0", [](std::uint64_t) { return 0.0; }, [](std::uint64_t) { return 0.0; },
          [](std::uint64_t) { return 0.0; }};
}

/// omega(n) = coef n^(-p), p > 1
inline Omega omega_power(double coef, double p) {
  require(coef >= 0.0 && p > 1.0, "omega: need coef >= 0 and exponent > 1");
  auto tail_lo = [coef, p](std::uint64_t M) {
    return coef * std::pow(static_cast<double>(M), 1.0 - p) / (p - 1.0);
  };
  auto tail_hi = [coef, p, tail_lo](std::uint64_t M) {
    return coef * std::pow(static_cast<double>(M), -p) + tail_lo(M);
  };
  return {detail::format_number(coef) + "*n^-" + detail::format_number(p),
          [coef, p](std::uint64_t n) { return coef * std::pow(static_cast<double>(n), -p); },
          tail_hi, tail_lo};
}

/// t_delta = min{t : sum_{n >= t} (omega(n) + nu / (C^A n^(A/B))) < delta/3},
/// decided with certified two-sided tail bounds.
inline std::uint64_t t_delta_exact(const Omega& omega, double nu, double A, double B, double C,
                                   double delta) {
  require(static_cast<bool>(omega.tail_upper) && static_cast<bool>(omega.tail_lower),
          "omega without a tail bound: the infinite tail cannot be certified");
  require(A / B > 1.0, "need A/B > 1");
  require(nu >= 0.0 && C > 0.0 && delta > 0.0, "need nu >= 0, C > 0, delta > 0");
  const double p = A / B;
  const double c = nu / std::pow(C, A);
  const Omega power = omega_power(c, p);
  const double target = delta / 3.0;
  auto decide = [&](std::uint64_t t) {
    for (std::uint64_t M = t + 64; M < (std::uint64_t{1} << 36); M *= 2) {
      CompensatedSum partial;
      for (std::uint64_t n = t; n < M; ++n) partial += omega.at(n) + power.at(n);
      const double s = partial.value();
      const double hi = (s + omega.tail_upper(M) + power.tail_upper(M)) * (1.0 + 1e-13);
      const double lo = (s + omega.tail_lower(M) + power.tail_lower(M)) * (1.0 - 1e-13);
      if (hi < target) return true;
      if (lo >= target) return false;
    }
    throw DomainError("t_delta: tail sum too close to delta/3 to certify");
  };
  std::uint64_t lo = 0, hi = 1;
  while (!decide(hi)) {
    lo = hi;
    require(hi < (std::uint64_t{1} << 40), "t_delta exceeds 2^40");
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (decide(mid) ? hi : lo) = mid;
  }
  return hi;
}

/// Constants and aggregates for one sequence instance of an M0 bound.
struct SequenceBound {
  bool lacunary = true;
  double eps = 0;
  M0Constants m0;
  Thm3Constants thm3;  // at delta/2
  std::uint64_t t = 0; // exact t at delta/2
  std::vector<double> Psi;     // Psi(n) along the sequence
  std::vector<double> Phi;     // sum of phi_k for k <= n
  std::vector<double> E;       // gcd sums (separated case)
  std::vector<std::string> warnings;

  ConstantsBundle bundle() const {
    ConstantsBundle b;
    b.theorem = lacunary ? "m0-lacunary" : "m0-separated";
    b.inputs = {Output::of("nu", m0.p.nu),       Output::of("A", m0.p.A),
                Output::of("B", m0.p.B),         Output::of("C", m0.p.C),
                Output::of("alpha", m0.p.alpha), Output::of("K0", m0.p.K0),
                Output::of("eps", eps),          Output::of("delta", m0.p.delta)};
    b.outputs = m0.outputs();
    for (auto& o : thm3.outputs()) b.outputs.push_back(o);
    b.outputs.push_back(Output::of("t_delta_half", static_cast<double>(t)));
    b.warnings = warnings;
    return b;
  }
};

namespace detail {
inline MonotoneFunction prefix_function(std::shared_ptr<const std::vector<double>> v) {
  MonotoneFunction f;
  f.exact_limit = v->size();
  f.at = [v](std::uint64_t n) { return Magnitude::from_value((*v)[n - 1]); };
  return f;
}
}  // namespace detail

/// Lacunary sequences: phi_n = psi_n Psi(n)^(1/3) (log+ Psi(n) + 1) + 2 psi_n.
inline SequenceBound lacunary_constants(M0Params p, double eps, const std::vector<double>& psi_n) {
  require(!psi_n.empty(), "need at least one sequence term");
  detail::check_eps_delta(eps, p.delta);
  SequenceBound s;
  s.lacunary = true;
  s.eps = eps;
  p.B = 1.0;
  s.m0 = m0_constants(p);
  s.warnings = s.m0.warnings;
  s.warnings.push_back(
      "printed Phi for the lacunary case is self-referential; using the per-term phi_n sum");
  CompensatedSum psi_acc, phi_acc;
  for (double v : psi_n) {
    psi_acc += v;
    const double Psi = psi_acc.value();
    phi_acc += v * std::cbrt(Psi) * (detail::log_plus(Psi) + 1.0) + 2.0 * v;
    s.Psi.push_back(Psi);
    s.Phi.push_back(phi_acc.value());
  }
  const double f1 = std::min(2.0 * psi_n[0], 1.0);
  s.thm3 = thm3_constants(eps, p.delta / 2.0, s.m0.K_lacunary, s.Phi[0], 1.0, f1,
                          detail::prefix_function(std::make_shared<const std::vector<double>>(s.Phi)),
                          true);
  for (auto& w : s.thm3.warnings) s.warnings.push_back(w);
  s.t = t_delta_exact(omega_power(3.0, p.A / p.B), p.nu, p.A, p.B, p.C, p.delta / 2.0);
  return s;
}

/// 2 K_{eps,delta/2} Psi^(2/3) (log Psi + 2)^(2+eps) + t
inline Magnitude lacunary_bound(const SequenceBound& s, std::uint64_t N) {
  require(N >= 1 && N <= s.Psi.size(), "lacunary_bound: N outside computed range");
  const double Psi = s.Psi[N - 1];
  const double base = std::max(std::log(Psi) + 2.0, 0.0);
  const double g = std::pow(Psi, 2.0 / 3.0) * std::pow(base, 2.0 + s.eps);
  return Magnitude::from_value(2.0) * s.thm3.K_eps_delta * Magnitude::from_value(g) +
         Magnitude::from_value(static_cast<double>(s.t));
}

/// Separated sequences: phi_n = psi_n (log+ Psi(n) + 2) + sum_{m<n} gcd min(...).
inline SequenceBound separated_constants(M0Params p, double eps, const std::vector<std::uint64_t>& q,
                                         const std::vector<double>& psi_n) {
  require(!psi_n.empty() && q.size() == psi_n.size(), "need matching sequence terms and psi values");
  detail::check_eps_delta(eps, p.delta);
  SequenceBound s;
  s.lacunary = false;
  s.eps = eps;
  s.m0 = m0_constants(p);
  s.warnings = s.m0.warnings;
  CompensatedSum psi_acc, phi_acc, e_acc;
  for (std::size_t n = 0; n < psi_n.size(); ++n) {
    psi_acc += psi_n[n];
    const double Psi = psi_acc.value();
    const double wn = psi_n[n] / static_cast<double>(q[n]);
    CompensatedSum cross;
    for (std::size_t m = 0; m < n; ++m)
      cross += static_cast<double>(std::gcd(q[m], q[n])) *
               std::min(psi_n[m] / static_cast<double>(q[m]), wn);
    e_acc += cross.value();
    phi_acc += psi_n[n] * (detail::log_plus(Psi) + 2.0) + cross.value();
    s.Psi.push_back(Psi);
    s.Phi.push_back(phi_acc.value());
    s.E.push_back(e_acc.value());
  }
  const double f1 = std::min(2.0 * psi_n[0], 1.0);
  s.thm3 = thm3_constants(eps, p.delta / 2.0, s.m0.K_separated, s.Phi[0], 1.0, f1,
                          detail::prefix_function(std::make_shared<const std::vector<double>>(s.Phi)),
                          true);
  for (auto& w : s.thm3.warnings) s.warnings.push_back(w);
  s.t = t_delta_exact(omega_power(1.0, 9.0), p.nu, p.A, p.B, p.C, p.delta / 2.0);
  return s;
}

/// K_{eps,delta/2} (G^(1/2) (log G)^(3/2+eps) + 2) + t with G = Psi (log+ Psi + 2) + E.
inline Magnitude separated_bound(const SequenceBound& s, std::uint64_t N) {
  require(N >= 1 && N <= s.Psi.size(), "separated_bound: N outside computed range");
  const double Psi = s.Psi[N - 1];
  const double G = Psi * (detail::log_plus(Psi) + 2.0) + s.E[N - 1];
  const double g = std::sqrt(G) * detail::log_pow(G, 1.5 + s.eps) + 2.0;
  return s.thm3.K_eps_delta * Magnitude::from_value(g) +
         Magnitude::from_value(static_cast<double>(s.t));
}

// ---------------------------------------------------------------------------
// Digit frequencies

struct NormalConstants {
  std::uint64_t base = 10;
  Thm2Constants thm2;
};

/// Theorem-2 constants with phi_k = 1/b, K = 1, C = 1, Phi0 = 1/b.
inline NormalConstants normal_constants(double eps, double delta, std::uint64_t b) {
  require(b >= 2, "base must be >= 2");
  const double inv_b = 1.0 / static_cast<double>(b);
  MonotoneFunction Phi;
  Phi.exact_limit = std::uint64_t{1} << 62;
  Phi.at = [inv_b](std::uint64_t n) { return Magnitude::from_value(static_cast<double>(n) * inv_b); };
  Phi.at_log = [inv_b](double L) -> std::optional<Magnitude> {
    return Magnitude::from_log(L + std::log(inv_b));
  };
  return {b, thm2_constants(eps, delta, 1.0, inv_b, 1.0, Phi)};
}

/// min{N, N/b + K N^(2/3) log^(1/3+eps)(N+2)}
inline Magnitude normal_envelope(const NormalConstants& c, std::uint64_t N) {
  const double n = static_cast<double>(N);
  const Magnitude tail = c.thm2.K_eps_delta *
                         Magnitude::from_log(2.0 / 3.0 * std::log(n) +
                                             (1.0 / 3.0 + c.thm2.eps) * std::log(std::log(n + 2.0)));
  const Magnitude env = Magnitude::from_value(n / static_cast<double>(c.base)) + tail;
  const Magnitude cap = Magnitude::from_value(n);
  return env < cap ? env : cap;
}

// ---------------------------------------------------------------------------
// Strong law

struct SllnConstants {
  double eps = 0, delta = 0, sigma2 = 0, Phi0 = 0, F = 0;
  Count r;
  Count N;
  double alpha = 0, beta = 0, K = 0;

  std::vector<Output> outputs() const {
    return {Output::of("r_eps_delta", r), Output::of("N_eps_delta", N),
            Output::of("alpha", alpha),   Output::of("beta", beta),
            Output::of("K_eps_delta", K), Output::of("Phi0", Phi0)};
  }
};

/// Phi0 = max_k F~_k, F = mean of the first variable.
inline SllnConstants slln_constants(double eps, double delta, double sigma2, double Phi0, double F) {
  detail::check_eps_delta(eps, delta);
  require(sigma2 > 0.0, "sigma^2 must be positive");
  require(Phi0 >= 1.0, "Phi0 = max F~_k must be >= 1");
  SllnConstants c;
  c.eps = eps;
  c.delta = delta;
  c.sigma2 = sigma2;
  c.Phi0 = Phi0;
  c.F = F;
  c.r = thm3_r(eps, delta, sigma2);
  require(c.r.is_exact(), "r_eps_delta too large for an integer N_eps_delta");
  const double n = std::ceil(static_cast<double>(*c.r.exact) / Phi0 - 1.0);
  c.N = Count::of(static_cast<std::uint64_t>(std::max(n, 0.0)));
  c.alpha = static_cast<double>(*c.N.exact) /
            std::max(std::sqrt(Phi0) * std::pow(std::log(Phi0 + 2.0), 1.5 + eps) + F, 1.0);
  c.beta = thm3_branch2(eps);
  c.K = std::max(c.alpha, c.beta);
  return c;
}

/// K (Phi^(1/2) log^(3/2+eps)(Phi) / N + Phi0 / N)
inline double slln_bound(const SllnConstants& c, double Phi, std::uint64_t N) {
  const double n = static_cast<double>(N);
  return c.K * (std::sqrt(Phi) * detail::log_pow(Phi, 1.5 + c.eps) / n + c.Phi0 / n);
}

/// Identically distributed form: K (F^(1/2) log^(3/2+eps)(N F) / N^(1/2) + F / N)
inline double slln_iid_bound(const SllnConstants& c, double F, std::uint64_t N) {
  const double n = static_cast<double>(N);
  return c.K * (std::sqrt(F) * detail::log_pow(n * F, 1.5 + c.eps) / std::sqrt(n) + F / n);
}

}  // namespace effdio
