#pragma once

// Approximating functions psi, their textual specs, and the aggregates
// Psi(Q), Psi'(Q), Gamma, L, L2 and Phi(N).

#include <charconv>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "effdio/core.hpp"
#include "effdio/numtheory.hpp"

namespace effdio {

/// Smallest declared range containing every value of psi.
enum class PsiRange {
  kHalfOpen,    // [0, 1/2)
  kHalfClosed,  // [0, 1/2]
  kUnit,        // (0, 1]
  kGeneral,     // [0, inf)
};

inline const char* to_string(PsiRange r) {
  switch (r) {
    case PsiRange::kHalfOpen: return "[0,1/2)";
    case PsiRange::kHalfClosed: return "[0,1/2]";
    case PsiRange::kUnit: return "(0,1]";
    case PsiRange::kGeneral: return "[0,inf)";
  }
  return "?";
}

namespace detail {

inline double parse_number(std::string_view text, std::size_t offset, std::string_view what) {
  double v = 0;
  const auto* b = text.data();
  const auto* e = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e || text.empty())
    throw DomainError("parse_psi: position " + std::to_string(offset) + ": expected a number for " +
                      std::string(what) + ", got '" + std::string(text) + "'");
  if (!std::isfinite(v))
    throw DomainError("parse_psi: position " + std::to_string(offset) + ": non-finite " +
                      std::string(what));
  return v;
}

inline std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace detail

class ApproxFunction {
 public:
  enum class Family { kConst, kInv, kInvLog, kTable, kMin, kCustom };

  static ApproxFunction constant(double v) {
    require(v >= 0.0 && std::isfinite(v), "const: value must be finite and >= 0");
    ApproxFunction f(Family::kConst);
    f.a_ = v;
    f.finish();
    return f;
  }
  /// psi(q) = c / q
  static ApproxFunction inv(double c) {
    require(c > 0.0 && std::isfinite(c), "inv: coefficient must be finite and > 0");
    ApproxFunction f(Family::kInv);
    f.a_ = c;
    f.finish();
    return f;
  }
  /// psi(q) = c / (q log(q+1))
  static ApproxFunction invlog(double c) {
    require(c > 0.0 && std::isfinite(c), "invlog: coefficient must be finite and > 0");
    ApproxFunction f(Family::kInvLog);
    f.a_ = c;
    f.finish();
    return f;
  }
  /// Tabulated psi(1..n); values[0] is psi(1).
  static ApproxFunction table(std::vector<double> values, std::string path) {
    require(!values.empty(), "table: no rows");
    for (std::size_t i = 0; i < values.size(); ++i)
      require(values[i] >= 0.0 && std::isfinite(values[i]),
              "table: psi(" + std::to_string(i + 1) + ") must be finite and >= 0");
    ApproxFunction f(Family::kTable);
    f.table_ = std::make_shared<const std::vector<double>>(std::move(values));
    f.path_ = std::move(path);
    f.finish();
    return f;
  }
  /// psi(q) = min(cap, inner(q))
  static ApproxFunction capped(double cap, const ApproxFunction& inner) {
    require(cap >= 0.0 && std::isfinite(cap), "min: cap must be finite and >= 0");
    require(inner.family_ != Family::kMin, "min: nested caps are not supported");
    ApproxFunction f(Family::kMin);
    f.a_ = cap;
    f.inner_ = std::make_shared<const ApproxFunction>(inner);
    f.finish();
    return f;
  }
  /// Arbitrary evaluator. Properties are declared by the caller and checked
  /// on a probe prefix.
  static ApproxFunction custom(std::function<double(std::uint64_t)> eval, std::string name,
                               bool monotone, bool divergent) {
    ApproxFunction f(Family::kCustom);
    f.custom_ = std::make_shared<const std::function<double(std::uint64_t)>>(std::move(eval));
    f.path_ = std::move(name);
    f.monotone_ = monotone;
    f.divergent_ = divergent;
    f.finish();
    return f;
  }

  double operator()(std::uint64_t q) const {
    switch (family_) {
      case Family::kConst: return a_;
      case Family::kInv: return a_ / static_cast<double>(q);
      case Family::kInvLog:
        return a_ / (static_cast<double>(q) * std::log1p(static_cast<double>(q)));
      case Family::kTable:
        if (q == 0 || q > table_->size())
          throw DomainError("table psi undefined at q=" + std::to_string(q) + " (rows 1.." +
                            std::to_string(table_->size()) + ")");
        return (*table_)[q - 1];
      case Family::kMin: return std::min(a_, (*inner_)(q));
      case Family::kCustom: return (*custom_)(q);
    }
    return 0.0;
  }

  Family family() const noexcept { return family_; }
  PsiRange range() const noexcept { return range_; }
  bool monotone() const noexcept { return monotone_; }
  bool divergent() const noexcept { return divergent_; }
  /// Largest q at which psi is defined; unlimited for closed forms.
  std::uint64_t domain_limit() const noexcept {
    if (family_ == Family::kTable) return table_->size();
    return std::numeric_limits<std::uint64_t>::max();
  }
  /// Supremum of psi over its (probed) domain.
  double sup() const noexcept { return sup_; }
  bool attains_zero() const noexcept { return attains_zero_; }

  /// The text this function was parsed from, or its canonical spec.
  const std::string& spec_text() const noexcept { return source_; }
  ApproxFunction& with_source(std::string text) {
    source_ = std::move(text);
    return *this;
  }

  /// Canonical spec text; parse_psi(to_spec()) reproduces this function
  /// for the closed-form families.
  std::string to_spec() const {
    switch (family_) {
      case Family::kConst: return "const:" + detail::format_number(a_);
      case Family::kInv: return "inv:" + detail::format_number(a_);
      case Family::kInvLog: return "invlog:" + detail::format_number(a_);
      case Family::kTable: return "table:" + path_;
      case Family::kMin: return "min:" + detail::format_number(a_) + "," + inner_->to_spec();
      case Family::kCustom: return "custom:" + path_;
    }
    return {};
  }

  /// Psi(n) for astronomically large n = exp(log_n), exact prefix plus the
  /// closed-form tail. Empty when the family has no tail model.
  std::optional<Magnitude> asymptotic_sum(double log_n) const {
    constexpr std::uint64_t kM = 1 << 16;
    if (!has_tail_model()) return std::nullopt;
    if (log_n <= std::log(static_cast<double>(kM))) return std::nullopt;
    CompensatedSum prefix;
    for (std::uint64_t q = 1; q <= kM; ++q) prefix += (*this)(q);
    const ApproxFunction& tail = family_ == Family::kMin ? *inner_ : *this;
    if (family_ == Family::kMin && tail.family_ != Family::kConst && tail(kM) > a_)
      return std::nullopt;
    const double log_m = std::log(static_cast<double>(kM));
    Magnitude rest;
    switch (tail.family_) {
      case Family::kConst: {
        const double c = family_ == Family::kMin ? std::min(a_, tail.a_) : tail.a_;
        if (c == 0.0) return Magnitude::from_value(prefix.value());
        // c (n - M)
        rest = Magnitude::from_log(std::log(c) + log_n + std::log1p(-std::exp(log_m - log_n)));
        break;
      }
      case Family::kInv: rest = Magnitude::from_value(tail.a_ * (log_n - log_m)); break;
      case Family::kInvLog:
        rest = Magnitude::from_value(tail.a_ * (std::log(log_n) - std::log(log_m)));
        break;
      default: return std::nullopt;
    }
    return Magnitude::from_value(prefix.value()) + rest;
  }
  bool has_tail_model() const noexcept {
    const Family f = family_ == Family::kMin ? inner_->family_ : family_;
    return f == Family::kConst || f == Family::kInv || f == Family::kInvLog;
  }

 private:
  explicit ApproxFunction(Family f) : family_(f) {}

  void finish() {
    constexpr std::uint64_t kProbe = 4096;
    switch (family_) {
      case Family::kConst:
        monotone_ = true;
        divergent_ = a_ > 0.0;
        sup_ = a_;
        attains_zero_ = a_ == 0.0;
        break;
      case Family::kInv:
      case Family::kInvLog:
        monotone_ = true;
        divergent_ = true;
        sup_ = (*this)(1);
        attains_zero_ = false;
        break;
      case Family::kMin:
        monotone_ = inner_->monotone_;
        divergent_ = inner_->divergent_ && a_ > 0.0;
        sup_ = std::min(a_, inner_->sup_);
        attains_zero_ = a_ == 0.0 || inner_->attains_zero_;
        break;
      case Family::kTable: {
        const auto& v = *table_;
        sup_ = *std::max_element(v.begin(), v.end());
        attains_zero_ = std::find(v.begin(), v.end(), 0.0) != v.end();
        monotone_ = std::is_sorted(v.rbegin(), v.rend());
        divergent_ = false;
        break;
      }
      case Family::kCustom: {
        sup_ = 0.0;
        attains_zero_ = false;
        double prev = std::numeric_limits<double>::infinity();
        for (std::uint64_t q = 1; q <= kProbe; ++q) {
          const double v = (*this)(q);
          require(v >= 0.0 && std::isfinite(v),
                  "custom psi '" + path_ + "' negative or non-finite at q=" + std::to_string(q));
          require(!monotone_ || v <= prev,
                  "custom psi '" + path_ + "' declared monotone but increases at q=" +
                      std::to_string(q));
          sup_ = std::max(sup_, v);
          attains_zero_ = attains_zero_ || v == 0.0;
          prev = v;
        }
        break;
      }
    }
    source_ = to_spec();
    if (sup_ < 0.5)
      range_ = PsiRange::kHalfOpen;
    else if (sup_ == 0.5)
      range_ = PsiRange::kHalfClosed;
    else if (sup_ <= 1.0 && !attains_zero_)
      range_ = PsiRange::kUnit;
    else
      range_ = PsiRange::kGeneral;
  }

  Family family_;
  double a_ = 0.0;
  std::shared_ptr<const std::vector<double>> table_;
  std::shared_ptr<const ApproxFunction> inner_;
  std::shared_ptr<const std::function<double(std::uint64_t)>> custom_;
  std::string path_;
  std::string source_;
  PsiRange range_ = PsiRange::kGeneral;
  bool monotone_ = false;
  bool divergent_ = false;
  bool attains_zero_ = false;
  double sup_ = 0.0;
};

/// Reads a `q,psi` CSV with rows q = 1, 2, 3, ... and no gaps.
inline std::vector<double> read_psi_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("table: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DomainError("table: '" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "q,psi") throw DomainError("table: expected header 'q,psi' in '" + path + "'");
  std::vector<double> values;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    const std::string where = path + ":" + std::to_string(lineno);
    if (comma == std::string::npos) throw DomainError("table: missing comma at " + where);
    long long q = 0;
    auto [p, ec] = std::from_chars(line.data(), line.data() + comma, q);
    if (ec != std::errc() || p != line.data() + comma)
      throw DomainError("table: bad q at " + where);
    if (q <= 0) throw DomainError("table: non-positive q at " + where);
    if (static_cast<std::size_t>(q) != values.size() + 1)
      throw DomainError("table: expected q=" + std::to_string(values.size() + 1) + " at " +
                        where + " (rows must start at 1 with no gaps)");
    values.push_back(detail::parse_number(std::string_view(line).substr(comma + 1), comma + 1,
                                          "psi at " + where));
  }
  return values;
}

/// Grammar: const:<v> | inv:<c> | invlog:<c> | table:<path> | min:<v>,<spec>
inline ApproxFunction parse_psi_body(std::string_view spec);

inline ApproxFunction parse_psi(std::string_view spec) {
  return parse_psi_body(spec).with_source(std::string(spec));
}

inline ApproxFunction parse_psi_body(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos)
    throw DomainError("parse_psi: position 0: expected '<family>:<argument>' in '" +
                      std::string(spec) + "'");
  const std::string_view fam = spec.substr(0, colon);
  const std::string_view arg = spec.substr(colon + 1);
  const std::size_t at = colon + 1;
  if (fam == "const") return ApproxFunction::constant(detail::parse_number(arg, at, "const value"));
  if (fam == "inv") return ApproxFunction::inv(detail::parse_number(arg, at, "inv coefficient"));
  if (fam == "invlog")
    return ApproxFunction::invlog(detail::parse_number(arg, at, "invlog coefficient"));
  if (fam == "table") {
    if (arg.empty()) throw DomainError("parse_psi: position " + std::to_string(at) + ": empty path");
    return ApproxFunction::table(read_psi_table(std::string(arg)), std::string(arg));
  }
  if (fam == "min") {
    const auto comma = arg.find(',');
    if (comma == std::string_view::npos)
      throw DomainError("parse_psi: position " + std::to_string(at) +
                        ": expected 'min:<cap>,<spec>'");
    const double cap = detail::parse_number(arg.substr(0, comma), at, "min cap");
    try {
      return ApproxFunction::capped(cap, parse_psi(arg.substr(comma + 1)));
    } catch (const DomainError& e) {
      throw DomainError(std::string(e.what()) + " (inside min at position " +
                        std::to_string(at + comma + 1) + ")");
    }
  }
  throw DomainError("parse_psi: position 0: unknown family '" + std::string(fam) +
                    "' (expected const, inv, invlog, table or min)");
}

// ---------------------------------------------------------------------------
// Validators. Each returns warnings and throws DomainError on failure.

inline std::vector<std::string> validate_schmidt(const ApproxFunction& psi) {
  std::vector<std::string> warnings;
  require(psi.monotone(), "psi must be non-increasing for the Schmidt bound");
  require(psi.range() == PsiRange::kHalfOpen,
          "psi must take values in [0,1/2) for the Schmidt bound; sup psi = " +
              detail::format_number(psi.sup()) + " (range " + to_string(psi.range()) + ")");
  require(psi(1) > 0.0, "psi(1) must be positive (K_eps divides by psi(1))");
  require(psi.divergent() || psi.family() == ApproxFunction::Family::kTable,
          "sum of psi must diverge");
  if (psi.family() == ApproxFunction::Family::kTable)
    warnings.push_back("divergence of a finite table cannot be verified");
  if (psi.attains_zero()) warnings.push_back("psi attains 0");
  return warnings;
}

inline std::vector<std::string> validate_abh(const ApproxFunction& psi) {
  require(psi.range() == PsiRange::kHalfOpen || psi.range() == PsiRange::kHalfClosed,
          "psi must take values in [0,1/2]; sup psi = " + detail::format_number(psi.sup()));
  std::vector<std::string> warnings;
  if (!psi.divergent()) warnings.push_back("divergence of psi' cannot be verified");
  return warnings;
}

/// M0 theorems need psi in (0,1], checked along the terms actually used.
inline void validate_m0_value(double v, std::uint64_t n) {
  if (!(v > 0.0 && v <= 1.0))
    throw DomainError("psi(q_" + std::to_string(n) + ") = " + detail::format_number(v) +
                      " outside (0,1]");
}

// ---------------------------------------------------------------------------
// Aggregates

struct GammaChain {
  double gamma;
  double L;
  double L2;
};

/// Gamma = Psi^2 + 1, L = log(3 Gamma), L2 = log(2 L).
inline GammaChain gamma_L_chain(double psi_value) {
  require(psi_value >= 0.0, "gamma_L_chain: Psi must be >= 0");
  const double g = psi_value * psi_value + 1.0;
  const double L = std::log(3.0 * g);
  return {g, L, std::log(2.0 * L)};
}

/// #{1 <= m <= N : gcd(m, N) <= Gamma(N)} with Gamma(N) = Psi(N)^2 + 1.
inline std::uint64_t capital_phi(std::uint64_t n, double psi_at_n) {
  return restricted_totient_real(gamma_L_chain(psi_at_n).gamma, n);
}

/// Cached prefix sums Psi(Q) and Psi'(Q). Extension takes an exclusive lock;
/// reads of computed prefixes share it.
class AggregateCache {
 public:
  explicit AggregateCache(ApproxFunction psi, const PhiTable* phi = nullptr)
      : psi_(std::move(psi)), phi_(phi) {}

  const ApproxFunction& psi() const noexcept { return psi_; }

  double psi_sum(std::uint64_t q) {
    require(q >= 1, "psi_sum: Q must be >= 1");
    {
      std::shared_lock lock(mu_);
      if (q <= psi_prefix_.size()) return psi_prefix_[q - 1];
    }
    std::unique_lock lock(mu_);
    psi_prefix_.reserve(q);
    while (psi_prefix_.size() < q) {
      psi_acc_ += psi_(psi_prefix_.size() + 1);
      psi_prefix_.push_back(psi_acc_.value());
    }
    return psi_prefix_[q - 1];
  }

  double psi_prime_sum(std::uint64_t q) {
    require(q >= 1, "psi_prime_sum: Q must be >= 1");
    require(phi_ != nullptr, "psi_prime_sum: no totient table attached");
    if (!(q <= phi_->limit()))
      throw DomainError("psi_prime_sum: Q=" + std::to_string(q) +
                        " exceeds sieve limit " + std::to_string(phi_->limit()));
    {
      std::shared_lock lock(mu_);
      if (q <= prime_prefix_.size()) return prime_prefix_[q - 1];
    }
    std::unique_lock lock(mu_);
    prime_prefix_.reserve(q);
    while (prime_prefix_.size() < q) {
      const std::uint64_t k = prime_prefix_.size() + 1;
      prime_acc_ += 2.0 * psi_(k) * (*phi_)[k] / static_cast<double>(k);
      prime_prefix_.push_back(prime_acc_.value());
    }
    return prime_prefix_[q - 1];
  }

 private:
  ApproxFunction psi_;
  const PhiTable* phi_;
  std::shared_mutex mu_;
  std::vector<double> psi_prefix_;
  std::vector<double> prime_prefix_;
  CompensatedSum psi_acc_;
  CompensatedSum prime_acc_;
};

inline double psi_sum(const ApproxFunction& psi, std::uint64_t q) {
  require(q >= 1, "psi_sum: Q must be >= 1");
  CompensatedSum s;
  for (std::uint64_t k = 1; k <= q; ++k) s += psi(k);
  return s.value();
}

inline double psi_prime_sum(const ApproxFunction& psi, std::uint64_t q, const PhiTable& phi) {
  require(q >= 1, "psi_prime_sum: Q must be >= 1");
  require(q <= phi.limit(), "psi_prime_sum: Q=" + std::to_string(q) + " exceeds sieve limit " +
                                std::to_string(phi.limit()));
  CompensatedSum s;
  for (std::uint64_t k = 1; k <= q; ++k) s += 2.0 * psi(k) * phi[k] / static_cast<double>(k);
  return s.value();
}

}  // namespace effdio
