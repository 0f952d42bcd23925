#pragma once

// Counting functions S, S', S*, R, digit counts A(d,b,N) and the gcd sum E(N).
//
// Points are FixedPointFraction or RationalPoint; both expose
// dist_less(q, psi), dist_shift_leq(q, gamma, psi) and nearest(q).
// Integer solutions p range over {0, ..., q} with gcd(0, q) = q.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "effdio/core.hpp"
#include "effdio/numtheory.hpp"
#include "effdio/psi.hpp"

namespace effdio {

/// #{1 <= q <= Q : ||q x|| < psi(q)}.
template <class Point>
std::uint64_t count_S(const Point& x, std::uint64_t Q, const ApproxFunction& psi) {
  require(Q >= 1, "count_S: Q must be >= 1");
  std::uint64_t count = 0;
  for (std::uint64_t q = 1; q <= Q; ++q) count += x.dist_less(q, psi(q)) ? 1 : 0;
  return count;
}

namespace detail {

template <class Point, class Accept>
bool has_witness(const Point& x, std::uint64_t q, double psi_q, Accept&& accept) {
  if (!x.dist_less(q, psi_q)) return false;
  const auto [p0, p1] = x.nearest(q);
  return accept(p0) || (p1 && accept(*p1));
}

}  // namespace detail

/// #{1 <= q <= Q : |q x - p| < psi(q) for some p with gcd(p, q) = 1}.
template <class Point>
std::uint64_t count_S_prime(const Point& x, std::uint64_t Q, const ApproxFunction& psi,
                            const PhiTable& phi) {
  require(Q >= 1, "count_S_prime: Q must be >= 1");
  require(Q <= phi.limit(), "count_S_prime: Q=" + std::to_string(Q) + " exceeds sieve limit " +
                                std::to_string(phi.limit()));
  std::uint64_t count = 0;
  for (std::uint64_t q = 1; q <= Q; ++q) {
    const double v = psi(q);
    if (!(v <= 0.5)) throw DomainError("count_S_prime: psi(" + std::to_string(q) + ") exceeds 1/2");
    count += detail::has_witness(x, q, v, [q](std::uint64_t p) { return std::gcd(p, q) == 1; });
  }
  return count;
}

/// S(x, Q) at every Q of an increasing list, in one pass.
template <class Point>
std::vector<std::uint64_t> count_S_at(const Point& x, const std::vector<std::uint64_t>& Qs,
                                      const ApproxFunction& psi) {
  require(!Qs.empty() && Qs.front() >= 1, "count_S_at: need Q >= 1");
  std::vector<std::uint64_t> out;
  std::uint64_t count = 0;
  std::size_t i = 0;
  for (std::uint64_t q = 1; i < Qs.size(); ++q) {
    count += x.dist_less(q, psi(q)) ? 1 : 0;
    for (; i < Qs.size() && Qs[i] == q; ++i) out.push_back(count);
    require(i == Qs.size() || Qs[i] > q, "count_S_at: Q values must be increasing");
  }
  return out;
}

/// S'(x, Q) at every Q of an increasing list, in one pass.
template <class Point>
std::vector<std::uint64_t> count_S_prime_at(const Point& x, const std::vector<std::uint64_t>& Qs,
                                            const ApproxFunction& psi, const PhiTable& phi) {
  require(!Qs.empty() && Qs.front() >= 1, "count_S_prime_at: need Q >= 1");
  require(Qs.back() <= phi.limit(), "count_S_prime_at: Q=" + std::to_string(Qs.back()) +
                                        " exceeds sieve limit " + std::to_string(phi.limit()));
  std::vector<std::uint64_t> out;
  std::uint64_t count = 0;
  std::size_t i = 0;
  for (std::uint64_t q = 1; i < Qs.size(); ++q) {
    const double v = psi(q);
    if (!(v <= 0.5)) throw DomainError("count_S_prime: psi(" + std::to_string(q) + ") exceeds 1/2");
    count += detail::has_witness(x, q, v, [q](std::uint64_t p) { return std::gcd(p, q) == 1; });
    for (; i < Qs.size() && Qs[i] == q; ++i) out.push_back(count);
    require(i == Qs.size() || Qs[i] > q, "count_S_prime_at: Q values must be increasing");
  }
  return out;
}

/// #{u < n <= v : ||n x|| < psi(n) with a witness m, gcd(m, n) <= Gamma(n)}.
template <class Point>
std::uint64_t count_S_star(const Point& x, std::uint64_t u, std::uint64_t v,
                           AggregateCache& cache) {
  require(u < v, "count_S_star: need u < v");
  const ApproxFunction& psi = cache.psi();
  std::uint64_t count = 0;
  for (std::uint64_t n = u + 1; n <= v; ++n) {
    const double gamma = gamma_L_chain(cache.psi_sum(n)).gamma;
    count += detail::has_witness(x, n, psi(n), [n, gamma](std::uint64_t m) {
      return static_cast<double>(std::gcd(m, n)) <= gamma;
    });
  }
  return count;
}

// ---------------------------------------------------------------------------
// Sequences

/// Increasing integer sequence q_1 < q_2 < ... with declared structure.
class SequenceSpec {
 public:
  /// q_n = base^n
  static SequenceSpec powers(std::uint64_t base) {
    require(base >= 2, "sequence: power base must be >= 2");
    SequenceSpec s;
    s.kind_ = Kind::kPowers;
    s.base_ = base;
    s.text_ = "pow:" + std::to_string(base);
    return s;
  }
  /// q_n = floor(a r^n)
  static SequenceSpec geometric(double a, double r) {
    require(a > 0.0 && r > 1.0, "sequence: geometric needs a > 0 and r > 1");
    SequenceSpec s;
    s.kind_ = Kind::kGeometric;
    s.a_ = a;
    s.r_ = r;
    s.text_ = "geom:" + detail::format_number(a) + ":" + detail::format_number(r);
    return s;
  }
  static SequenceSpec list(std::vector<std::uint64_t> terms, std::string text = "list") {
    require(!terms.empty(), "sequence: empty list");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      require(terms[i] >= 1, "sequence: terms must be positive");
      require(i == 0 || terms[i] > terms[i - 1],
              "sequence: not strictly increasing at n=" + std::to_string(i + 1));
    }
    SequenceSpec s;
    s.kind_ = Kind::kList;
    s.list_ = std::move(terms);
    s.text_ = std::move(text);
    return s;
  }

  SequenceSpec& lacunary(double k0) {
    require(k0 > 1.0, "sequence: lacunary constant K0 must exceed 1");
    k0_ = k0;
    return *this;
  }
  SequenceSpec& growth(double B, double C) {
    require(B >= 1.0 && C > 0.0, "sequence: growth needs B >= 1 and C > 0");
    growth_ = std::pair{B, C};
    return *this;
  }
  SequenceSpec& separated(double alpha, std::uint64_t m0 = 1) {
    require(alpha > 0.0 && alpha < 1.0, "sequence: separation exponent must lie in (0,1)");
    alpha_ = alpha;
    m0_ = m0;
    return *this;
  }

  std::optional<double> lacunary_constant() const { return k0_; }
  std::optional<std::pair<double, double>> growth_parameters() const { return growth_; }
  std::optional<double> separation() const { return alpha_; }
  std::uint64_t separation_start() const { return m0_; }
  const std::string& text() const { return text_; }

  /// The first N terms. Throws when the generator is exhausted or overflows.
  std::vector<std::uint64_t> terms(std::uint64_t N) const {
    std::vector<std::uint64_t> out;
    out.reserve(N);
    for (std::uint64_t n = 1; n <= N; ++n) {
      std::uint64_t q = 0;
      switch (kind_) {
        case Kind::kPowers: {
          const double bits = static_cast<double>(n) * std::log2(static_cast<double>(base_));
          if (!(bits < 63.0))
            throw DomainError("sequence exhausted: " + text_ + " overflows 63 bits at n=" +
                              std::to_string(n));
          q = 1;
          for (std::uint64_t i = 0; i < n; ++i) q *= base_;
          break;
        }
        case Kind::kGeometric: {
          const double v = std::floor(a_ * std::pow(r_, static_cast<double>(n)));
          if (!(v < 9.2e18))
            throw DomainError("sequence exhausted: " + text_ + " overflows at n=" +
                              std::to_string(n));
          if (!(v >= 1.0))
            throw DomainError("sequence: geometric term below 1 at n=" + std::to_string(n));
          q = static_cast<std::uint64_t>(v);
          break;
        }
        case Kind::kList:
          require(n <= list_.size(), "sequence exhausted: list has " +
                                         std::to_string(list_.size()) + " terms, need " +
                                         std::to_string(N));
          q = list_[n - 1];
          break;
      }
      require(out.empty() || q > out.back(),
              "sequence: not strictly increasing at n=" + std::to_string(n));
      out.push_back(q);
    }
    check(out);
    return out;
  }

  /// Verifies the declared lacunary and growth properties on a prefix.
  void check(const std::vector<std::uint64_t>& q) const {
    for (std::size_t i = 0; i < q.size(); ++i) {
      const std::uint64_t n = i + 1;
      if (k0_ && i + 1 < q.size())
        require(static_cast<double>(q[i + 1]) >= *k0_ * static_cast<double>(q[i]),
                "sequence not lacunary with K0=" + detail::format_number(*k0_) + " at n=" +
                    std::to_string(n));
      if (growth_) {
        const auto [B, C] = *growth_;
        require(std::log(static_cast<double>(q[i])) > C * std::pow(static_cast<double>(n), 1.0 / B),
                "growth condition log q_n > C n^(1/B) fails at n=" + std::to_string(n));
      }
    }
  }

 private:
  enum class Kind { kPowers, kGeometric, kList };
  Kind kind_ = Kind::kList;
  std::uint64_t base_ = 2;
  double a_ = 1.0, r_ = 2.0;
  std::vector<std::uint64_t> list_;
  std::string text_;
  std::optional<double> k0_;
  std::optional<std::pair<double, double>> growth_;
  std::optional<double> alpha_;
  std::uint64_t m0_ = 1;
};

/// pow:<b> | geom:<a>:<r> | list:<q1>,<q2>,... | file:<path> (one term per line)
inline SequenceSpec parse_sequence(std::string_view spec) {
  const auto colon = spec.find(':');
  require(colon != std::string_view::npos,
          "sequence: expected '<kind>:<args>' in '" + std::string(spec) + "'");
  const auto kind = spec.substr(0, colon);
  const auto arg = spec.substr(colon + 1);
  auto parse_u64 = [&](std::string_view t) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    require(ec == std::errc() && p == t.data() + t.size() && !t.empty(),
            "sequence: bad integer '" + std::string(t) + "'");
    return v;
  };
  if (kind == "pow") return SequenceSpec::powers(parse_u64(arg));
  if (kind == "geom") {
    const auto c2 = arg.find(':');
    require(c2 != std::string_view::npos, "sequence: expected geom:<a>:<r>");
    return SequenceSpec::geometric(detail::parse_number(arg.substr(0, c2), colon + 1, "geom a"),
                                   detail::parse_number(arg.substr(c2 + 1), colon + 2 + c2, "geom r"));
  }
  std::vector<std::uint64_t> terms;
  if (kind == "list") {
    std::size_t start = 0;
    while (start <= arg.size()) {
      const auto comma = arg.find(',', start);
      const auto end = comma == std::string_view::npos ? arg.size() : comma;
      terms.push_back(parse_u64(arg.substr(start, end - start)));
      start = end + 1;
    }
    return SequenceSpec::list(std::move(terms), std::string(spec));
  }
  if (kind == "file") {
    std::ifstream in{std::string(arg)};
    require(static_cast<bool>(in), "sequence: cannot open '" + std::string(arg) + "'");
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) terms.push_back(parse_u64(line));
    }
    return SequenceSpec::list(std::move(terms), std::string(spec));
  }
  throw DomainError("sequence: unknown kind '" + std::string(kind) +
                    "' (expected pow, geom, list or file)");
}

/// Inhomogeneous shift gamma = num/den in [0,1] and the Fourier-decay
/// parameters (nu, A) of the measure.
struct InhomParams {
  std::uint64_t gamma_num = 0;
  std::uint64_t gamma_den = 1;
  double nu = 1.0 / kPi;
  double A = 6.0;

  double gamma() const { return static_cast<double>(gamma_num) / static_cast<double>(gamma_den); }
  void validate() const {
    require(gamma_den >= 1 && gamma_num <= gamma_den, "gamma must lie in [0,1]");
    require(nu > 0.0, "nu must be positive");
    require(A > 2.0, "A must exceed 2");
  }
};

/// Whether psi is applied to the term q_n or to the index n.
enum class PsiArgument { kTerm, kIndex };

/// psi values along a sequence: psi(q_n) or psi(n), checked against (0,1].
inline std::vector<double> psi_along(const std::vector<std::uint64_t>& q, const ApproxFunction& psi,
                                     PsiArgument arg) {
  std::vector<double> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    out[i] = psi(arg == PsiArgument::kTerm ? q[i] : i + 1);
    validate_m0_value(out[i], i + 1);
  }
  return out;
}

namespace detail {
inline FixedPointFraction shift_for(const FixedPointFraction&, const InhomParams& p) {
  return FixedPointFraction::from_rational(p.gamma_num, p.gamma_den);
}
inline RationalPoint shift_for(const RationalPoint&, const InhomParams& p) {
  return RationalPoint(p.gamma_num % p.gamma_den, p.gamma_den);
}
}  // namespace detail

/// R(x, N) = #{1 <= n <= N : ||q_n x - gamma|| <= psi_n} over precomputed terms.
template <class Point>
std::uint64_t count_R(const Point& x, const std::vector<std::uint64_t>& q,
                      const std::vector<double>& psi_n, const InhomParams& params,
                      std::uint64_t N) {
  require(N <= q.size() && N <= psi_n.size(),
          "count_R: sequence exhausted before N=" + std::to_string(N));
  const auto gamma = detail::shift_for(x, params);
  std::uint64_t count = 0;
  for (std::uint64_t n = 0; n < N; ++n) count += x.dist_shift_leq(q[n], gamma, psi_n[n]);
  return count;
}

template <class Point>
std::uint64_t count_R(const Point& x, std::uint64_t N, const InhomParams& params,
                      const ApproxFunction& psi, const SequenceSpec& seq,
                      PsiArgument arg = PsiArgument::kTerm) {
  params.validate();
  const auto q = seq.terms(N);
  return count_R(x, q, psi_along(q, psi, arg), params, N);
}

// ---------------------------------------------------------------------------
// Digits

/// Base-b digits of the fractional part of x, with terminating expansions
/// continued by zeros.
class DigitStream {
 public:
  DigitStream(const FixedPointFraction& x, std::uint64_t base) : frac_(x.bits()), base_(base) {
    require(base >= 2 && base <= (std::uint64_t{1} << 32), "digits: base must lie in [2, 2^32]");
  }
  DigitStream(const RationalPoint& x, std::uint64_t base)
      : rational_(true), num_(x.num() % x.den()), den_(x.den()), base_(base) {
    require(base >= 2 && base <= (std::uint64_t{1} << 32), "digits: base must lie in [2, 2^32]");
  }

  std::uint64_t next() {
    if (rational_) {
      const u128 t = u128{num_} * base_;
      num_ = static_cast<std::uint64_t>(t % den_);
      return static_cast<std::uint64_t>(t / den_);
    }
    const u128 lo = static_cast<std::uint64_t>(frac_);
    const u128 hi = frac_ >> 64;
    const u128 top = hi * base_ + ((lo * base_) >> 64);
    frac_ *= base_;
    return static_cast<std::uint64_t>(top >> 64);
  }

 private:
  bool rational_ = false;
  u128 frac_ = 0;
  std::uint64_t num_ = 0, den_ = 1;
  std::uint64_t base_;
};

/// A(d, b, N): occurrences of digit d among the first N base-b digits.
template <class Point>
std::uint64_t digit_count(const Point& x, std::uint64_t d, std::uint64_t b, std::uint64_t N) {
  require(d < b, "digit_count: need 0 <= d < b");
  DigitStream s(x, b);
  std::uint64_t count = 0;
  for (std::uint64_t i = 0; i < N; ++i) count += s.next() == d;
  return count;
}

// ---------------------------------------------------------------------------
// gcd sum

/// E(N) = sum_{m<n<=N} gcd(q_m, q_n) min(psi_m/q_m, psi_n/q_n).
inline double gcd_sum_E(const std::vector<std::uint64_t>& q, const std::vector<double>& psi_n,
                        std::uint64_t N) {
  require(N <= q.size() && N <= psi_n.size(), "gcd_sum_E: fewer than N terms");
  CompensatedSum s;
  for (std::uint64_t n = 1; n < N; ++n) {
    const double wn = psi_n[n] / static_cast<double>(q[n]);
    for (std::uint64_t m = 0; m < n; ++m) {
      const double wm = psi_n[m] / static_cast<double>(q[m]);
      s += static_cast<double>(std::gcd(q[m], q[n])) * std::min(wm, wn);
    }
  }
  return s.value();
}

/// Prefix values E(1..N) in one pass.
inline std::vector<double> gcd_sum_E_prefix(const std::vector<std::uint64_t>& q,
                                            const std::vector<double>& psi_n) {
  std::vector<double> out(q.size(), 0.0);
  CompensatedSum s;
  for (std::size_t n = 0; n < q.size(); ++n) {
    const double wn = psi_n[n] / static_cast<double>(q[n]);
    for (std::size_t m = 0; m < n; ++m) {
      const double wm = psi_n[m] / static_cast<double>(q[m]);
      s += static_cast<double>(std::gcd(q[m], q[n])) * std::min(wm, wn);
    }
    out[n] = s.value();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Series

struct CountRecord {
  std::uint64_t Q = 0;
  std::uint64_t count = 0;
  double main_term = 0.0;
  double bound = 0.0;
  bool violated = false;

  friend bool operator==(const CountRecord&, const CountRecord&) = default;
};

using CountSeries = std::vector<CountRecord>;

inline CountRecord make_record(std::uint64_t Q, std::uint64_t count, double main_term,
                               double bound) {
  const double dev = std::fabs(static_cast<double>(count) - main_term);
  return {Q, count, main_term, bound, dev > bound};
}

}  // namespace effdio
