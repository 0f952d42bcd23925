#pragma once

// Monte Carlo measurement of exceptional sets and deterministic checks of the
// restricted-totient inequalities.

#include <algorithm>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "effdio/constants.hpp"
#include "effdio/counting.hpp"
#include "effdio/core.hpp"
#include "effdio/numtheory.hpp"
#include "effdio/psi.hpp"
#include "effdio/stats.hpp"

namespace effdio {

// ---------------------------------------------------------------------------
// Grids

struct GridSpec {
  enum class Kind { kLinear, kGeometric };
  Kind kind = Kind::kGeometric;
  std::uint64_t start = 1;
  std::uint64_t stop = 1;
  std::uint64_t points = 24;

  static GridSpec geometric(std::uint64_t start, std::uint64_t stop, std::uint64_t points = 24) {
    return {Kind::kGeometric, start, stop, points};
  }
  static GridSpec linear(std::uint64_t start, std::uint64_t stop, std::uint64_t points) {
    return {Kind::kLinear, start, stop, points};
  }

  const char* kind_name() const { return kind == Kind::kLinear ? "linear" : "geometric"; }

  /// Strictly increasing evaluation points from start to stop inclusive.
  std::vector<std::uint64_t> values() const {
    require(start >= 1 && start <= stop, "grid: need 1 <= start <= stop");
    require(points >= 1, "grid: need at least one point");
    std::vector<std::uint64_t> v;
    if (points == 1 || start == stop) return {stop};
    for (std::uint64_t i = 0; i < points; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(points - 1);
      double x = kind == Kind::kLinear
                     ? static_cast<double>(start) + t * static_cast<double>(stop - start)
                     : static_cast<double>(start) *
                           std::pow(static_cast<double>(stop) / static_cast<double>(start), t);
      auto q = static_cast<std::uint64_t>(std::llround(x));
      q = std::clamp(q, start, stop);
      if (v.empty() || q > v.back()) v.push_back(q);
    }
    if (v.back() != stop) v.push_back(stop);
    return v;
  }
};

/// geom:<start>:<stop>[:<points>] | lin:<start>:<stop>[:<points>]
inline GridSpec parse_grid(std::string_view text) {
  std::vector<std::uint64_t> nums;
  const auto colon = text.find(':');
  require(colon != std::string_view::npos, "grid: expected '<geom|lin>:<start>:<stop>[:<points>]'");
  const auto kind = text.substr(0, colon);
  std::string_view rest = text.substr(colon + 1);
  while (!rest.empty()) {
    const auto c = rest.find(':');
    const auto tok = rest.substr(0, c);
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    require(ec == std::errc() && p == tok.data() + tok.size() && !tok.empty(),
            "grid: bad integer '" + std::string(tok) + "'");
    nums.push_back(v);
    rest = c == std::string_view::npos ? std::string_view{} : rest.substr(c + 1);
  }
  require(nums.size() == 2 || nums.size() == 3, "grid: expected start, stop and optional points");
  const std::uint64_t points = nums.size() == 3 ? nums[2] : 24;
  if (kind == "geom") return GridSpec::geometric(nums[0], nums[1], points);
  if (kind == "lin") return GridSpec::linear(nums[0], nums[1], points);
  throw DomainError("grid: unknown kind '" + std::string(kind) + "' (expected geom or lin)");
}

// ---------------------------------------------------------------------------
// Reports

struct ViolationReport {
  std::string theorem;
  std::vector<Output> inputs;
  std::uint64_t samples = 0;
  std::uint64_t violators = 0;
  double fraction = 0.0;
  Interval wilson;
  double delta = 0.0;
  double slack = 0.01;
  bool pass = false;
  std::uint64_t seed = 0;
  GridSpec grid;
  std::vector<std::uint64_t> grid_points;
  std::vector<std::string> warnings;
  std::vector<Output> constants;
  /// Smallest bound - deviation seen over all samples and grid points.
  double min_margin = std::numeric_limits<double>::infinity();
  std::vector<std::string> violator_x;
};

/// Outcome of one sample path.
struct SampleOutcome {
  bool violated = false;
  double margin = std::numeric_limits<double>::infinity();
  std::string label;
};

inline constexpr std::size_t kMaxViolatorLabels = 20;

/// Runs sample(i, rng) for every index and merges outcomes in index order.
template <class Sample>
void run_samples(ViolationReport& r, unsigned threads, Sample&& sample) {
  require(r.samples > 0, "samples must be positive");
  require(r.delta > 0.0, "delta must be positive");
  std::vector<SampleOutcome> out(r.samples);
  parallel_for(r.samples, threads, [&](std::uint64_t i) {
    SampleRng rng(r.seed, i);
    out[i] = sample(i, rng);
  });
  for (const auto& o : out) {
    if (o.violated) {
      ++r.violators;
      if (r.violator_x.size() < kMaxViolatorLabels) r.violator_x.push_back(o.label);
    }
    r.min_margin = std::min(r.min_margin, o.margin);
  }
  r.fraction = static_cast<double>(r.violators) / static_cast<double>(r.samples);
  r.wilson = wilson_interval(r.violators, r.samples);
  r.pass = r.wilson.hi <= r.delta + r.slack;
}

namespace detail {

inline std::string label_of(const FixedPointFraction& x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x.to_double());
  return buf;
}

/// bound - |count - main|, or +inf when the bound is beyond double range.
inline double margin(Magnitude bound, double deviation) {
  return bound.representable() ? bound.value() - deviation
                               : std::numeric_limits<double>::infinity();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Monte Carlo checks

/// |S(x,Q) - 2 Psi(Q)| against the effective Schmidt bound on every grid point.
inline ViolationReport mc_check_schmidt(const ApproxFunction& psi, double eps, double delta,
                                        std::uint64_t samples, const GridSpec& grid,
                                        std::uint64_t seed, unsigned threads = 1) {
  require(samples >= 100, "Schmidt check needs at least 100 samples");
  ViolationReport r;
  r.theorem = "schmidt";
  r.inputs = {Output::text_only("psi", psi.spec_text()), Output::of("eps", eps),
              Output::of("delta", delta)};
  r.samples = samples;
  r.delta = delta;
  r.seed = seed;
  r.grid = grid;
  r.grid_points = grid.values();
  const auto c = est_constants(eps, delta, psi);
  r.warnings = c.warnings;
  r.constants = c.bundle(psi.spec_text()).outputs;

  const std::uint64_t qmax = r.grid_points.back();
  std::vector<u128> thr(qmax + 1);
  for (std::uint64_t q = 1; q <= qmax; ++q) thr[q] = detail::scaled_threshold(psi(q), 128, true);
  AggregateCache cache(psi);
  std::vector<double> main_term;
  std::vector<Magnitude> bound;
  for (auto Q : r.grid_points) {
    const double Psi = cache.psi_sum(Q);
    main_term.push_back(2.0 * Psi);
    bound.push_back(schmidt_bound(c, Psi));
  }
  const auto& pts = r.grid_points;
  run_samples(r, threads, [&](std::uint64_t, SampleRng& rng) {
    const auto x = rng.fraction();
    SampleOutcome o;
    std::uint64_t count = 0;
    std::size_t g = 0;
    for (std::uint64_t q = 1; q <= qmax; ++q) {
      count += FixedPointFraction::dist_bits(x.frac_times(q)) < thr[q];
      if (q == pts[g]) {
        const double dev = std::fabs(static_cast<double>(count) - main_term[g]);
        o.margin = std::min(o.margin, detail::margin(bound[g], dev));
        if (!bound[g].bounds(dev)) o.violated = true;
        ++g;
      }
    }
    if (o.violated) o.label = detail::label_of(x);
    return o;
  });
  return r;
}

/// Per-q data for the coprime count: thresholds and Psi'(Q) prefix.
struct CoprimeSetup {
  std::vector<u128> thr;
  std::vector<double> psi_prime;  // at grid points
};

inline CoprimeSetup coprime_setup(const ApproxFunction& psi, const PhiTable& phi,
                                  const std::vector<std::uint64_t>& pts) {
  const std::uint64_t qmax = pts.back();
  require(qmax <= phi.limit(), "grid exceeds sieve limit " + std::to_string(phi.limit()));
  CoprimeSetup s;
  s.thr.resize(qmax + 1);
  for (std::uint64_t q = 1; q <= qmax; ++q) {
    const double v = psi(q);
    require(v <= 0.5, "psi(" + std::to_string(q) + ") exceeds 1/2");
    s.thr[q] = detail::scaled_threshold(v, 128, true);
  }
  AggregateCache cache(psi, &phi);
  for (auto Q : pts) s.psi_prime.push_back(cache.psi_prime_sum(Q));
  return s;
}

/// Deviations S'(x,Q) - Psi'(Q) at the grid points for one x.
inline void coprime_deviations(const FixedPointFraction& x, const CoprimeSetup& s,
                               const std::vector<std::uint64_t>& pts, std::vector<double>& dev) {
  dev.resize(pts.size());
  std::uint64_t count = 0;
  std::size_t g = 0;
  const std::uint64_t qmax = pts.back();
  for (std::uint64_t q = 1; q <= qmax; ++q) {
    if (FixedPointFraction::dist_bits(x.frac_times(q)) < s.thr[q]) {
      const auto [p0, p1] = x.nearest(q);
      count += std::gcd(p0, q) == 1 || (p1 && std::gcd(*p1, q) == 1);
    }
    if (q == pts[g]) {
      dev[g] = static_cast<double>(count) - s.psi_prime[g];
      ++g;
    }
  }
}

/// Empirical lower estimate of the variance constant: the largest
/// mean((S' - Psi')^2) (log Psi')^C / Psi'^2 over grid points with Psi' > e.
inline double estimate_abh_constant(const ApproxFunction& psi, double C, std::uint64_t samples,
                                    const GridSpec& grid, std::uint64_t seed,
                                    const PhiTable& phi, unsigned threads = 1) {
  const auto pts = grid.values();
  const auto s = coprime_setup(psi, phi, pts);
  std::vector<std::vector<double>> devs(samples);
  parallel_for(samples, threads, [&](std::uint64_t i) {
    SampleRng rng(seed, i);
    coprime_deviations(rng.fraction(), s, pts, devs[i]);
  });
  double best = 0.0;
  for (std::size_t g = 0; g < pts.size(); ++g) {
    const double pp = s.psi_prime[g];
    if (!(pp > std::exp(1.0))) continue;
    CompensatedSum m2;
    for (const auto& d : devs) m2 += d[g] * d[g];
    const double var = m2.value() / static_cast<double>(samples);
    best = std::max(best, var * std::pow(std::log(pp), C) / (pp * pp));
  }
  return best;
}

/// |S'(x,Q) - Psi'(Q)| against max{k/2, (2e Psi' + 1)/(log Psi')^C + 1/2}.
inline ViolationReport mc_check_abh(const ApproxFunction& psi, double C, double delta, double calC,
                                    std::uint64_t samples, const GridSpec& grid,
                                    std::uint64_t seed, const PhiTable& phi,
                                    unsigned threads = 1) {
  ViolationReport r;
  r.theorem = "abh";
  r.inputs = {Output::text_only("psi", psi.spec_text()), Output::of("C", C),
              Output::of("delta", delta), Output::of("variance_constant", calC)};
  r.samples = samples;
  r.delta = delta;
  r.seed = seed;
  r.grid = grid;
  r.grid_points = grid.values();
  r.warnings = validate_abh(psi);
  r.warnings.push_back("variance constant is user-supplied and unverified");
  const Count k = abh_k(C, delta, calC);
  r.constants = {Output::of("k_C_delta", k)};
  const auto s = coprime_setup(psi, phi, r.grid_points);
  std::vector<Magnitude> bound;
  for (double pp : s.psi_prime) bound.push_back(abh_bound(k, pp, C));
  const auto& pts = r.grid_points;
  run_samples(r, threads, [&](std::uint64_t, SampleRng& rng) {
    const auto x = rng.fraction();
    std::vector<double> dev;
    coprime_deviations(x, s, pts, dev);
    SampleOutcome o;
    for (std::size_t g = 0; g < pts.size(); ++g) {
      const double d = std::fabs(dev[g]);
      o.margin = std::min(o.margin, detail::margin(bound[g], d));
      if (!bound[g].bounds(d)) o.violated = true;
    }
    if (o.violated) o.label = detail::label_of(x);
    return o;
  });
  return r;
}

/// Inputs shared by both sequence checks.
struct SequenceCheck {
  SequenceSpec seq = SequenceSpec::powers(2);
  ApproxFunction psi = ApproxFunction::constant(1.0);
  PsiArgument psi_arg = PsiArgument::kTerm;
  InhomParams inhom;
  M0Params m0;
  double eps = 1.0;
};

namespace detail {

inline ViolationReport run_sequence_check(const SequenceCheck& in, bool lacunary,
                                          std::uint64_t samples, const GridSpec& grid,
                                          std::uint64_t seed, unsigned threads) {
  in.inhom.validate();
  ViolationReport r;
  r.theorem = lacunary ? "m0-lacunary" : "m0-separated";
  r.samples = samples;
  r.delta = in.m0.delta;
  r.seed = seed;
  r.grid = grid;
  r.grid_points = grid.values();
  const std::uint64_t nmax = r.grid_points.back();
  const auto q = in.seq.terms(nmax);
  const auto psi_n = psi_along(q, in.psi, in.psi_arg);
  M0Params p = in.m0;
  p.nu = in.inhom.nu;
  p.A = in.inhom.A;
  SequenceBound sb;
  if (lacunary) {
    require(in.seq.lacunary_constant().has_value(),
            "sequence must declare a lacunary constant K0 for this check");
    p.K0 = *in.seq.lacunary_constant();
    if (const auto g = in.seq.growth_parameters()) p.C = g->second;
    sb = lacunary_constants(p, in.eps, psi_n);
  } else {
    require(in.seq.growth_parameters().has_value() && in.seq.separation().has_value(),
            "sequence must declare growth (B, C) and separation alpha for this check");
    require(in.seq.separation_start() == 1, "separation start m0 must be 1");
    std::tie(p.B, p.C) = *in.seq.growth_parameters();
    p.alpha = *in.seq.separation();
    sb = separated_constants(p, in.eps, q, psi_n);
  }
  r.inputs = {Output::text_only("sequence", in.seq.text()),
              Output::text_only("psi", in.psi.spec_text()),
              Output::text_only("psi_argument", in.psi_arg == PsiArgument::kTerm ? "q" : "index"),
              Output::of("gamma", in.inhom.gamma()), Output::of("nu", in.inhom.nu),
              Output::of("A", in.inhom.A), Output::of("eps", in.eps),
              Output::of("delta", in.m0.delta)};
  const auto bundle = sb.bundle();
  r.constants = bundle.outputs;
  r.warnings = bundle.warnings;
  r.warnings.push_back("measure is Lebesgue on [0,1); nu = 1/pi recorded");

  const auto gamma = FixedPointFraction::from_rational(in.inhom.gamma_num, in.inhom.gamma_den);
  std::vector<u128> thr(nmax);
  for (std::uint64_t n = 0; n < nmax; ++n) thr[n] = scaled_threshold(psi_n[n], 128, false);
  std::vector<Magnitude> bound;
  std::vector<double> main_term;
  for (auto N : r.grid_points) {
    bound.push_back(lacunary ? lacunary_bound(sb, N) : separated_bound(sb, N));
    main_term.push_back(2.0 * sb.Psi[N - 1]);
  }
  const auto& pts = r.grid_points;
  run_samples(r, threads, [&](std::uint64_t, SampleRng& rng) {
    const auto x = rng.fraction();
    SampleOutcome o;
    std::uint64_t count = 0;
    std::size_t g = 0;
    for (std::uint64_t n = 1; n <= nmax; ++n) {
      count += FixedPointFraction::dist_bits(x.frac_times(q[n - 1]) - gamma.bits()) < thr[n - 1];
      if (n == pts[g]) {
        const double dev = std::fabs(static_cast<double>(count) - main_term[g]);
        o.margin = std::min(o.margin, margin(bound[g], dev));
        if (!bound[g].bounds(dev)) o.violated = true;
        ++g;
      }
    }
    if (o.violated) o.label = label_of(x);
    return o;
  });
  return r;
}

}  // namespace detail

/// |R(x,N) - 2 Psi(N)| for a lacunary sequence.
inline ViolationReport mc_check_m0_lacunary(const SequenceCheck& in, std::uint64_t samples,
                                            const GridSpec& grid, std::uint64_t seed,
                                            unsigned threads = 1) {
  return detail::run_sequence_check(in, true, samples, grid, seed, threads);
}

/// |R(x,N) - 2 Psi(N)| for an alpha-separated sequence with growth condition.
inline ViolationReport mc_check_m0_separated(const SequenceCheck& in, std::uint64_t samples,
                                             const GridSpec& grid, std::uint64_t seed,
                                             unsigned threads = 1) {
  return detail::run_sequence_check(in, false, samples, grid, seed, threads);
}

/// A(d,b,N) against min{N, N/b + K N^(2/3) log^(1/3+eps)(N+2)}. Without an
/// explicit x, digits are drawn iid uniform, which samples x uniformly.
inline ViolationReport check_normal(std::optional<RationalPoint> explicit_x, std::uint64_t d,
                                    std::uint64_t b, const GridSpec& grid, double eps,
                                    double delta, std::uint64_t samples, std::uint64_t seed,
                                    unsigned threads = 1) {
  require(b >= 2 && d < b, "need base >= 2 and 0 <= d < base");
  ViolationReport r;
  r.theorem = "normal";
  r.inputs = {Output::of("d", static_cast<double>(d)), Output::of("b", static_cast<double>(b)),
              Output::of("eps", eps), Output::of("delta", delta)};
  if (explicit_x)
    r.inputs.push_back(Output::text_only(
        "x", std::to_string(explicit_x->num()) + "/" + std::to_string(explicit_x->den())));
  r.samples = explicit_x ? 1 : samples;
  r.delta = delta;
  r.seed = seed;
  r.grid = grid;
  r.grid_points = grid.values();
  const auto c = normal_constants(eps, delta, b);
  r.constants = c.thm2.outputs();
  std::vector<Magnitude> env;
  for (auto N : r.grid_points) env.push_back(normal_envelope(c, N));
  const auto& pts = r.grid_points;
  const std::uint64_t nmax = pts.back();
  run_samples(r, threads, [&](std::uint64_t i, SampleRng& rng) {
    SampleOutcome o;
    std::optional<DigitStream> digits;
    if (explicit_x) digits.emplace(*explicit_x, b);
    std::uint64_t count = 0;
    std::size_t g = 0;
    for (std::uint64_t n = 1; n <= nmax; ++n) {
      count += (digits ? digits->next() : rng.below(b)) == d;
      if (n == pts[g]) {
        const auto a = static_cast<double>(count);
        o.margin = std::min(o.margin, detail::margin(env[g], a));
        if (!env[g].bounds(a)) o.violated = true;
        ++g;
      }
    }
    if (o.violated) o.label = "sample " + std::to_string(i);
    return o;
  });
  if (explicit_x) {
    // A single fixed x has an exact verdict.
    r.pass = r.violators == 0;
    r.warnings.push_back("explicit x: verdict is exact, Wilson interval is informational");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Lemma checks

struct LemmaCheck {
  bool holds = false;
  double lower_slack = 0.0;  // middle - lower bound
  double upper_slack = 0.0;  // upper bound - middle
  std::string witness;
};

/// 0 <= N - M + 1 - sum_{n=M}^N phi(k,n)/n <= (N-M)/k + log N, with the
/// middle term as an exact rational.
inline LemmaCheck check_lemma41(std::uint64_t M, std::uint64_t N, std::uint64_t k) {
  namespace mp = boost::multiprecision;
  require(M >= 1 && M < N && k >= 1, "lemma41: need 1 <= M < N and k >= 1");
  mp::cpp_rational middle = 0;
  for (std::uint64_t n = M; n <= N; ++n) {
    const std::uint64_t f = restricted_totient(k, n);
    if (f != n) middle += mp::cpp_rational(mp::cpp_int(n - f), mp::cpp_int(n));
  }
  using Float = mp::cpp_bin_float_50;
  const Float mid = Float(mp::numerator(middle)) / Float(mp::denominator(middle));
  const Float upper = Float(N - M) / Float(k) + mp::log(Float(N));
  LemmaCheck c;
  c.lower_slack = mid.convert_to<double>();
  c.upper_slack = Float(upper - mid).convert_to<double>();
  c.holds = middle >= 0 && mid <= upper;
  c.witness = "M=" + std::to_string(M) + " N=" + std::to_string(N) + " k=" + std::to_string(k);
  return c;
}

struct Lemma41Sweep {
  bool holds = true;
  double min_upper_slack = std::numeric_limits<double>::infinity();
  std::uint64_t pairs = 0;  // (N, k) pairs, each covering every M < N
  std::vector<std::string> failures;
};

/// Every 1 <= M < N <= nmax and 1 <= k <= kmax, in exact integer arithmetic.
/// With L = lcm(1..max(nmax, kmax)) and A(n) = L sum_{m<=n} (m - phi(k,m))/m,
/// the upper bound at (M, N, k) reads
///   A(N) - N L/k - (A(M-1) - M L/k) <= L log N,
/// so a running minimum of A(M-1) - M L/k decides all M at once.
inline Lemma41Sweep sweep_lemma41(std::uint64_t nmax, std::uint64_t kmax) {
  namespace mp = boost::multiprecision;
  using Float = mp::cpp_bin_float_50;
  require(nmax >= 2 && kmax >= 1, "lemma41 sweep: need nmax >= 2, kmax >= 1");
  Lemma41Sweep s;
  mp::cpp_int L = 1;
  for (std::uint64_t i = 2; i <= std::max(nmax, kmax); ++i) L = mp::lcm(L, mp::cpp_int(i));
  const Float Lf(L);
  std::vector<mp::cpp_int> A(nmax + 1);
  for (std::uint64_t k = 1; k <= kmax; ++k) {
    const mp::cpp_int step = L / k;
    A[0] = 0;
    for (std::uint64_t n = 1; n <= nmax; ++n) {
      const std::uint64_t f = restricted_totient(k, n);
      if (f > n) {
        s.holds = false;
        s.failures.push_back("lower: k=" + std::to_string(k) + " n=" + std::to_string(n));
        A[n] = A[n - 1];
        continue;
      }
      A[n] = A[n - 1] + (L / n) * (n - f);
    }
    mp::cpp_int best;  // min over M < N of A(M-1) - M L/k
    for (std::uint64_t N = 2; N <= nmax; ++N) {
      const mp::cpp_int cand = A[N - 2] - step * (N - 1);
      if (N == 2 || cand < best) best = cand;
      const mp::cpp_int lhs = A[N] - step * N - best;
      const Float slack = (Lf * mp::log(Float(N)) - Float(lhs)) / Lf;
      ++s.pairs;
      s.min_upper_slack = std::min(s.min_upper_slack, slack.convert_to<double>());
      if (slack < 0) {
        s.holds = false;
        s.failures.push_back("upper: N=" + std::to_string(N) + " k=" + std::to_string(k));
      }
    }
  }
  return s;
}

/// (1-1/k) sum psi - psi(M) log M - sum psi/n <= sum psi phi(k,n)/n <= sum psi.
inline LemmaCheck check_lemma42(const ApproxFunction& psi, std::uint64_t M, std::uint64_t N,
                                std::uint64_t k) {
  require(M >= 1 && M < N && k >= 1, "lemma42: need 1 <= M < N and k >= 1");
  CompensatedSum sum_psi, sum_psi_n, middle;
  for (std::uint64_t n = M; n <= N; ++n) {
    const double v = psi(n);
    const double nn = static_cast<double>(n);
    sum_psi += v;
    sum_psi_n += v / nn;
    middle += v * static_cast<double>(restricted_totient(k, n)) / nn;
  }
  const double lower = (1.0 - 1.0 / static_cast<double>(k)) * sum_psi.value() -
                       psi(M) * std::log(static_cast<double>(M)) - sum_psi_n.value();
  LemmaCheck c;
  c.lower_slack = middle.value() - lower;
  c.upper_slack = sum_psi.value() - middle.value();
  const double tol = 1e-12 * std::max(1.0, sum_psi.value());
  c.holds = c.lower_slack >= -tol && c.upper_slack >= -tol;
  c.witness = "M=" + std::to_string(M) + " N=" + std::to_string(N) + " k=" + std::to_string(k);
  return c;
}

/// 8 sqrt(e) (1/log(2 log 3) + 1/log 2) + 3/(log 3 log(2 log 3)) + 1/(log 2 log 3)
inline double lemma43_constant() {
  const double l2 = std::log(2.0), l3 = std::log(3.0), l23 = std::log(2.0 * l3);
  return 8.0 * std::sqrt(std::exp(1.0)) * (1.0 / l23 + 1.0 / l2) + 3.0 / (l3 * l23) +
         1.0 / (l2 * l3);
}

inline constexpr double kLemma43Bound = 40.6;

struct Lemma43Sweep {
  bool holds = true;
  double min_upper_slack = std::numeric_limits<double>::infinity();
  double final_sum = 0.0;
  std::vector<std::string> failures;
};

/// 0 <= sum_{n<=N} psi(n)(1 - Phi(n)/n) <= 40.6 L(N) L2(N) for every N <= nmax.
inline Lemma43Sweep sweep_lemma43(const ApproxFunction& psi, std::uint64_t nmax) {
  require(psi.monotone(), "lemma43: psi must be non-increasing");
  require(nmax >= 1, "lemma43: need N >= 1");
  Lemma43Sweep s;
  CompensatedSum Psi, sum;
  for (std::uint64_t n = 1; n <= nmax; ++n) {
    const double v = psi(n);
    Psi += v;
    const std::uint64_t Phi = capital_phi(n, Psi.value());
    const double term = v * static_cast<double>(n - Phi) / static_cast<double>(n);
    sum += term;
    const auto g = gamma_L_chain(Psi.value());
    const double slack = kLemma43Bound * g.L * g.L2 - sum.value();
    s.min_upper_slack = std::min(s.min_upper_slack, slack);
    if (Phi > n || slack < 0.0 || sum.value() < 0.0) {
      s.holds = false;
      if (s.failures.size() < 20) s.failures.push_back("N=" + std::to_string(n));
    }
  }
  s.final_sum = sum.value();
  return s;
}

inline LemmaCheck check_lemma43(const ApproxFunction& psi, std::uint64_t N) {
  const auto s = sweep_lemma43(psi, N);
  CompensatedSum Psi;
  for (std::uint64_t n = 1; n <= N; ++n) Psi += psi(n);
  const auto g = gamma_L_chain(Psi.value());
  LemmaCheck c;
  c.lower_slack = s.final_sum;
  c.upper_slack = kLemma43Bound * g.L * g.L2 - s.final_sum;
  c.holds = c.lower_slack >= 0.0 && c.upper_slack >= 0.0;
  c.witness = "N=" + std::to_string(N);
  return c;
}

}  // namespace effdio
