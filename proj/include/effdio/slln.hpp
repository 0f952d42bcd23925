#pragma once

// Bounded random-variable sequences and the effective strong law.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "effdio/constants.hpp"
#include "effdio/core.hpp"
#include "effdio/psi.hpp"
#include "effdio/stats.hpp"
#include "effdio/verify.hpp"

namespace effdio {

/// A finitely supported distribution.
class BoundedLaw {
 public:
  static BoundedLaw bernoulli(double p) {
    require(p >= 0.0 && p <= 1.0, "bernoulli: p must lie in [0,1]");
    return from_atoms({0.0, 1.0}, {1.0 - p, p}, "bernoulli:" + detail::format_number(p));
  }
  /// Uniform on the integers a..b.
  static BoundedLaw uniform(std::int64_t a, std::int64_t b) {
    require(a <= b, "uniform: need a <= b");
    require(b - a < 1'000'000, "uniform: support too large");
    std::vector<double> v, w;
    for (std::int64_t i = a; i <= b; ++i) v.push_back(static_cast<double>(i));
    w.assign(v.size(), 1.0 / static_cast<double>(v.size()));
    return from_atoms(std::move(v), std::move(w),
                      "uniform:" + std::to_string(a) + ":" + std::to_string(b));
  }
  static BoundedLaw from_atoms(std::vector<double> values, std::vector<double> probs,
                               std::string text) {
    require(!values.empty() && values.size() == probs.size(), "law: need matching atoms");
    CompensatedSum total;
    for (std::size_t i = 0; i < values.size(); ++i) {
      require(std::isfinite(values[i]), "law: values must be finite (bounded variables only)");
      require(probs[i] >= 0.0 && std::isfinite(probs[i]), "law: probabilities must be >= 0");
      total += probs[i];
    }
    require(std::fabs(total.value() - 1.0) <= 1e-9, "law: probabilities must sum to 1");
    BoundedLaw l;
    l.values_ = std::move(values);
    l.text_ = std::move(text);
    CompensatedSum m, m2, c;
    for (std::size_t i = 0; i < l.values_.size(); ++i) {
      const double p = probs[i] / total.value();
      m += p * l.values_[i];
      c += p;
      l.cdf_.push_back(c.value());
    }
    l.cdf_.back() = 1.0;
    l.mean_ = m.value();
    for (std::size_t i = 0; i < l.values_.size(); ++i) {
      const double d = l.values_[i] - l.mean_;
      m2 += probs[i] / total.value() * d * d;
    }
    l.variance_ = m2.value();
    return l;
  }

  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return variance_; }
  const std::string& text() const noexcept { return text_; }

  double sample(SampleRng& rng) const {
    if (values_.size() == 2) return rng.uniform() < cdf_[0] ? values_[0] : values_[1];
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return values_[std::min<std::size_t>(it - cdf_.begin(), values_.size() - 1)];
  }

 private:
  std::vector<double> values_;
  std::vector<double> cdf_;
  double mean_ = 0.0;
  double variance_ = 0.0;
  std::string text_;
};

/// Table file with header `value,probability`.
inline BoundedLaw read_law_table(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "table: cannot open '" + path + "'");
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "table: empty file '" + path + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "value,probability", "table: header must be 'value,probability'");
  std::vector<double> v, w;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    require(comma != std::string::npos, "table: line " + std::to_string(lineno) + ": expected two fields");
    v.push_back(detail::parse_number(std::string_view(line).substr(0, comma), 0, "value"));
    w.push_back(detail::parse_number(std::string_view(line).substr(comma + 1), comma + 1, "probability"));
  }
  return BoundedLaw::from_atoms(std::move(v), std::move(w), "table:" + path);
}

/// Independent variables X_k with law laws[(k-1) mod m].
class RVSequenceSpec {
 public:
  static RVSequenceSpec iid(BoundedLaw law) { return schedule({std::move(law)}); }
  static RVSequenceSpec schedule(std::vector<BoundedLaw> laws) {
    require(!laws.empty(), "rv: empty schedule");
    RVSequenceSpec s;
    s.laws_ = std::move(laws);
    for (std::size_t i = 0; i < s.laws_.size(); ++i)
      s.text_ += (i ? ";" : "") + s.laws_[i].text();
    if (s.laws_.size() > 1) s.text_ = "schedule:" + s.text_;
    return s;
  }

  const BoundedLaw& law(std::uint64_t k) const { return laws_[(k - 1) % laws_.size()]; }
  double mean(std::uint64_t k) const { return law(k).mean(); }
  double variance(std::uint64_t k) const { return law(k).variance(); }
  /// F~_k = max{F_k, 1}
  double mean_tilde(std::uint64_t k) const { return std::max(mean(k), 1.0); }
  /// sigma^2 = max{max_k sigma_k^2, 1}
  double sigma2() const {
    double s = 1.0;
    for (const auto& l : laws_) s = std::max(s, l.variance());
    return s;
  }
  /// Phi0 = max_k F~_k
  double phi0() const {
    double s = 1.0;
    for (const auto& l : laws_) s = std::max(s, std::max(l.mean(), 1.0));
    return s;
  }
  bool identically_distributed() const { return laws_.size() == 1; }
  const std::string& text() const noexcept { return text_; }

 private:
  std::vector<BoundedLaw> laws_;
  std::string text_;
};

namespace detail {
inline BoundedLaw parse_law(std::string_view spec) {
  const auto colon = spec.find(':');
  require(colon != std::string_view::npos, "rv: expected '<family>:<args>' in '" + std::string(spec) + "'");
  const auto fam = spec.substr(0, colon);
  const auto arg = spec.substr(colon + 1);
  if (fam == "bernoulli") return BoundedLaw::bernoulli(parse_number(arg, colon + 1, "bernoulli p"));
  if (fam == "uniform") {
    const auto c = arg.find(':');
    require(c != std::string_view::npos, "rv: expected uniform:<a>:<b>");
    const double a = parse_number(arg.substr(0, c), colon + 1, "uniform a");
    const double b = parse_number(arg.substr(c + 1), colon + 2 + c, "uniform b");
    require(a == std::floor(a) && b == std::floor(b), "rv: uniform bounds must be integers");
    return BoundedLaw::uniform(static_cast<std::int64_t>(a), static_cast<std::int64_t>(b));
  }
  if (fam == "table") return read_law_table(std::string(arg));
  throw DomainError("rv: unknown family '" + std::string(fam) +
                    "' (expected bernoulli, uniform, table or schedule)");
}
}  // namespace detail

/// bernoulli:<p> | uniform:<a>:<b> | table:<path> | schedule:<law>;<law>;...
inline RVSequenceSpec parse_rv(std::string_view spec) {
  constexpr std::string_view kSchedule = "schedule:";
  if (spec.substr(0, kSchedule.size()) == kSchedule) {
    std::vector<BoundedLaw> laws;
    auto rest = spec.substr(kSchedule.size());
    while (true) {
      const auto semi = rest.find(';');
      laws.push_back(detail::parse_law(rest.substr(0, semi)));
      if (semi == std::string_view::npos) break;
      rest = rest.substr(semi + 1);
    }
    return RVSequenceSpec::schedule(std::move(laws));
  }
  return RVSequenceSpec::iid(detail::parse_law(spec));
}

/// Phi(N) = sum_{k<=N} F~_k
inline double rv_phi(const RVSequenceSpec& spec, std::uint64_t N) {
  CompensatedSum s;
  for (std::uint64_t k = 1; k <= N; ++k) s += spec.mean_tilde(k);
  return s.value();
}

inline SllnConstants slln_constants(double eps, double delta, const RVSequenceSpec& spec) {
  return slln_constants(eps, delta, spec.sigma2(), spec.phi0(), spec.mean(1));
}

/// |N^-1 sum_{k<=N} (X_k - F_k)| against the effective bound on every grid N.
inline ViolationReport simulate_slln(const RVSequenceSpec& spec, double eps, double delta,
                                     const GridSpec& grid, std::uint64_t samples,
                                     std::uint64_t seed, unsigned threads = 1) {
  ViolationReport r;
  r.theorem = "slln";
  r.inputs = {Output::text_only("rv", spec.text()), Output::of("eps", eps),
              Output::of("delta", delta), Output::of("sigma2", spec.sigma2())};
  r.samples = samples;
  r.delta = delta;
  r.seed = seed;
  r.grid = grid;
  r.grid_points = grid.values();
  const auto c = slln_constants(eps, delta, spec);
  r.constants = c.outputs();
  const auto& pts = r.grid_points;
  const std::uint64_t nmax = pts.back();
  std::vector<double> bound;
  CompensatedSum Phi;
  std::size_t g = 0;
  for (std::uint64_t k = 1; k <= nmax; ++k) {
    Phi += spec.mean_tilde(k);
    if (k == pts[g]) {
      bound.push_back(slln_bound(c, Phi.value(), k));
      ++g;
    }
  }
  if (spec.identically_distributed()) {
    const double F = spec.mean_tilde(1);
    r.constants.push_back(Output::of("iid_bound_at_max_N", slln_iid_bound(c, F, nmax)));
    r.warnings.push_back("identically distributed: the F/N corollary bound is reported alongside");
  }
  run_samples(r, threads, [&](std::uint64_t i, SampleRng& rng) {
    SampleOutcome o;
    CompensatedSum dev;
    std::size_t gi = 0;
    for (std::uint64_t k = 1; k <= nmax; ++k) {
      const auto& law = spec.law(k);
      dev += law.sample(rng) - law.mean();
      if (k == pts[gi]) {
        const double lhs = std::fabs(dev.value()) / static_cast<double>(k);
        o.margin = std::min(o.margin, bound[gi] - lhs);
        if (lhs > bound[gi]) o.violated = true;
        ++gi;
      }
    }
    if (o.violated) o.label = "path " + std::to_string(i);
    return o;
  });
  return r;
}

struct VarianceCertificate {
  double variance_sum = 0.0;  // sum_{m<k<=n} sigma_k^2
  double bound = 0.0;         // sigma^2 sum_{m<k<=n} F~_k
  double slack = 0.0;
  bool holds = false;
};

inline VarianceCertificate variance_certificate(const RVSequenceSpec& spec, std::uint64_t m,
                                                std::uint64_t n) {
  require(m < n, "variance_certificate: need m < n");
  CompensatedSum v, f;
  for (std::uint64_t k = m + 1; k <= n; ++k) {
    v += spec.variance(k);
    f += spec.mean_tilde(k);
  }
  VarianceCertificate c;
  c.variance_sum = v.value();
  c.bound = spec.sigma2() * f.value();
  c.slack = c.bound - c.variance_sum;
  c.holds = c.slack >= 0.0;
  return c;
}

}  // namespace effdio
