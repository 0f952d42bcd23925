#pragma once

// Command-line front-end: constants, count, verify, m0, normal, slln.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "effdio/effdio.hpp"

namespace effdio::cli {

/// Thrown for flag combinations CLI11 cannot express; exits with code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// "a/b", an integer, or a plain decimal, read exactly.
inline std::pair<std::uint64_t, std::uint64_t> parse_exact_fraction(const std::string& text) {
  auto u64 = [&](std::string_view t) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty())
      throw UsageError("bad number '" + text + "' (expected a/b or a decimal)");
    return v;
  };
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    const auto num = u64(std::string_view(text).substr(0, slash));
    const auto den = u64(std::string_view(text).substr(slash + 1));
    if (den == 0) throw UsageError("zero denominator in '" + text + "'");
    return {num, den};
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) return {u64(text), 1};
  const std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  const std::size_t places = text.size() - dot - 1;
  if (places > 18) throw UsageError("too many decimal places in '" + text + "'");
  std::uint64_t den = 1;
  for (std::size_t i = 0; i < places; ++i) den *= 10;
  return {u64(digits.empty() ? "0" : digits), den};
}

inline RationalPoint parse_point(const std::string& text) {
  const auto [n, d] = parse_exact_fraction(text);
  return RationalPoint(n, d);
}

namespace detail {

inline void emit(const std::string& content, const std::optional<std::string>& path,
                 std::ostream& out) {
  if (path)
    write_file(*path, content);
  else
    out << content;
}

inline unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

inline Json lemma_json(const std::string& name, Json inputs, const LemmaCheck& c) {
  Json j;
  j["theorem"] = name;
  j["inputs"] = std::move(inputs);
  j["holds"] = c.holds;
  j["lower_slack"] = c.lower_slack;
  j["upper_slack"] = c.upper_slack;
  j["witness"] = c.witness;
  return j;
}

inline double as_double(Magnitude m) {
  return m.representable() ? m.value() : std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Shared sampling flags.
struct SamplingFlags {
  std::uint64_t samples = 1000;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> grid;
  unsigned threads = detail::default_threads();
  std::optional<std::string> out;

  void add(CLI::App* app, std::uint64_t default_samples, bool seed_required = true) {
    samples = default_samples;
    app->add_option("--samples", samples, "number of sampled points or paths")
        ->capture_default_str();
    auto* s = app->add_option("--seed", seed, "64-bit seed for the counter-mode streams");
    if (seed_required) s->required();
    app->add_option("--grid", grid, "evaluation grid geom|lin:<start>:<stop>[:<points>]");
    app->add_option("--threads", threads, "worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber);
    app->add_option("--out", out, "write the JSON report here instead of stdout");
  }
  GridSpec grid_or(GridSpec fallback) const { return grid ? parse_grid(*grid) : fallback; }
};

inline int report_exit(const ViolationReport& r, const std::optional<std::string>& out,
                       std::ostream& os) {
  detail::emit(dump(to_json(r)), out, os);
  return r.pass ? 0 : 1;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Effective Diophantine counting: constants, counts and Monte Carlo checks",
               "effdio"};
  app.require_subcommand(1);
  app.allow_extras(false);

  // constants -------------------------------------------------------------
  auto* constants = app.add_subcommand("constants", "evaluate effective constants as JSON");
  std::string theorem;
  std::optional<std::string> c_psi, c_omega, c_rv, c_out;
  std::optional<double> c_eps, c_delta, c_K, c_phi0, c_C, c_f1, c_calC, c_nu, c_A, c_B, c_Cg,
      c_alpha, c_K0, c_sigma2, c_F;
  const std::set<std::string> theorems{"est", "thm2", "thm3", "abh", "m0", "tdelta", "slln"};
  constants->add_option("--theorem", theorem, "est|thm2|thm3|abh|m0|tdelta|slln")
      ->required()
      ->check(CLI::IsMember(theorems));
  std::map<std::string, CLI::Option*> copt;
  copt["psi"] = constants->add_option("--psi", c_psi, "psi spec (est) or phi_k spec (thm2, thm3)");
  copt["eps"] = constants->add_option("--eps", c_eps, "epsilon > 0");
  copt["delta"] = constants->add_option("--delta", c_delta, "delta > 0");
  copt["K"] = constants->add_option("--K", c_K, "variance constant K of the hypothesis");
  copt["phi0"] = constants->add_option("--phi0", c_phi0, "Phi0");
  copt["C"] = constants->add_option("--C", c_C, "bound constant C (thm2, thm3) or exponent C (abh)");
  copt["f1"] = constants->add_option("--f1", c_f1, "f_1 (thm3; default phi_1)");
  copt["calC"] = constants->add_option("--variance-constant", c_calC,
                                       "variance constant of the abh bound (unverified)");
  copt["nu"] = constants->add_option("--nu", c_nu, "Fourier decay nu (default 1/pi)");
  copt["A"] = constants->add_option("--A", c_A, "Fourier decay exponent A");
  copt["B"] = constants->add_option("--B", c_B, "growth exponent B");
  copt["Cg"] = constants->add_option("--C-growth", c_Cg, "growth constant C in log q_n > C n^(1/B)");
  copt["alpha"] = constants->add_option("--alpha", c_alpha, "separation exponent alpha");
  copt["K0"] = constants->add_option("--K0", c_K0, "lacunary constant K0");
  copt["omega"] = constants->add_option("--omega", c_omega, "tdelta weight: zero | power:<coef>:<p>");
  copt["rv"] = constants->add_option("--rv", c_rv, "slln random-variable spec");
  copt["sigma2"] = constants->add_option("--sigma2", c_sigma2, "slln sigma^2 (without --rv)");
  copt["F"] = constants->add_option("--F", c_F, "slln mean of the first variable (without --rv)");
  constants->add_option("--out", c_out, "write JSON here instead of stdout");
  const std::map<std::string, std::set<std::string>> applicable{
      {"est", {"psi", "eps", "delta"}},
      {"thm2", {"psi", "eps", "delta", "K", "phi0", "C"}},
      {"thm3", {"psi", "eps", "delta", "K", "phi0", "C", "f1"}},
      {"abh", {"C", "delta", "calC"}},
      {"m0", {"nu", "A", "B", "Cg", "alpha", "K0", "delta"}},
      {"tdelta", {"omega", "nu", "A", "B", "Cg", "delta"}},
      {"slln", {"eps", "delta", "rv", "sigma2", "phi0", "F"}}};

  // count -----------------------------------------------------------------
  auto* count = app.add_subcommand("count", "S(x,Q) or S'(x,Q) series as CSV or JSON");
  std::string k_psi, k_x, k_kind = "s", k_format = "csv";
  std::uint64_t k_qmax = 0;
  std::optional<double> k_eps, k_delta, k_C, k_calC;
  std::optional<std::string> k_grid, k_out, k_plot;
  count->add_option("--psi", k_psi, "psi spec")->required();
  count->add_option("--x", k_x, "x as a/b or an exact decimal")->required();
  count->add_option("--qmax", k_qmax, "largest Q")->required()->check(CLI::PositiveNumber);
  count->add_option("--kind", k_kind, "s | sprime")->check(CLI::IsMember({"s", "sprime"}))
      ->capture_default_str();
  count->add_option("--eps", k_eps, "epsilon for the Schmidt bound column");
  count->add_option("--delta", k_delta, "delta for the bound column");
  count->add_option("--C", k_C, "exponent C for the sprime bound column");
  count->add_option("--variance-constant", k_calC, "variance constant for the sprime bound column");
  count->add_option("--grid", k_grid, "Q grid (default every Q up to 1000, else 24 geometric)");
  count->add_option("--format", k_format, "csv | json")->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  count->add_option("--out", k_out, "output file (default stdout)");
  count->add_option("--plot", k_plot, "also write a gnuplot script for the CSV at --out");

  // verify ----------------------------------------------------------------
  auto* verify = app.add_subcommand("verify", "Monte Carlo checks and lemma inequalities");
  verify->require_subcommand(1);
  auto* v_schmidt = verify->add_subcommand("schmidt", "|S - 2 Psi| against the effective bound");
  std::string vs_psi;
  double vs_eps = 1.0, vs_delta = 0.1;
  SamplingFlags vs_flags;
  v_schmidt->add_option("--psi", vs_psi, "psi spec")->required();
  v_schmidt->add_option("--eps", vs_eps, "epsilon")->capture_default_str();
  v_schmidt->add_option("--delta", vs_delta, "delta")->capture_default_str();
  vs_flags.add(v_schmidt, 1000);

  auto* v_abh = verify->add_subcommand("abh", "|S' - Psi'| against the effective bound");
  std::string va_psi;
  double va_C = 9.0, va_delta = 0.2, va_calC = 0.0;
  SamplingFlags va_flags;
  v_abh->add_option("--psi", va_psi, "psi spec")->required();
  v_abh->add_option("--C", va_C, "exponent C > 4")->capture_default_str();
  v_abh->add_option("--delta", va_delta, "delta")->capture_default_str();
  v_abh->add_option("--variance-constant", va_calC, "variance constant (unverified)")->required();
  va_flags.add(v_abh, 500);

  auto* v_l41 = verify->add_subcommand("lemma41", "restricted totient sum bounds");
  std::optional<std::uint64_t> l41_M, l41_N, l41_k, l41_nmax, l41_kmax;
  v_l41->add_option("--M", l41_M, "single check: M");
  v_l41->add_option("--N", l41_N, "single check: N");
  v_l41->add_option("--k", l41_k, "single check: k");
  v_l41->add_option("--nmax", l41_nmax, "sweep: all M < N <= nmax");
  v_l41->add_option("--kmax", l41_kmax, "sweep: all k <= kmax");

  auto* v_l42 = verify->add_subcommand("lemma42", "weighted restricted totient bounds");
  std::string l42_psi;
  std::uint64_t l42_M = 1, l42_N = 2, l42_k = 1;
  v_l42->add_option("--psi", l42_psi, "psi spec")->required();
  v_l42->add_option("--M", l42_M, "M")->required();
  v_l42->add_option("--N", l42_N, "N")->required();
  v_l42->add_option("--k", l42_k, "k")->required();

  auto* v_l43 = verify->add_subcommand("lemma43", "sum psi (1 - Phi/n) <= 40.6 L L2 for all n <= N");
  std::string l43_psi;
  std::uint64_t l43_N = 1;
  v_l43->add_option("--psi", l43_psi, "non-increasing psi spec")->required();
  v_l43->add_option("--N", l43_N, "largest N")->required()->check(CLI::PositiveNumber);

  // m0 --------------------------------------------------------------------
  auto* m0 = app.add_subcommand("m0", "inhomogeneous counts along sequences");
  m0->require_subcommand(1);
  struct M0Flags {
    std::string seq, psi = "const:1", psi_arg = "q", gamma = "0";
    std::optional<double> K0, B, Cg, alpha;
    double nu = 1.0 / kPi, A = 6.0, eps = 1.0, delta = 0.1;
    std::uint64_t nmax = 40;
    SamplingFlags flags;
  };
  M0Flags lac, sep;
  auto add_m0 = [&](CLI::App* sub, M0Flags& f, bool lacunary) {
    sub->add_option("--seq", f.seq, "pow:<b> | geom:<a>:<r> | list:<q1>,... | file:<path>")
        ->required();
    sub->add_option("--psi", f.psi, "psi spec")->capture_default_str();
    sub->add_option("--psi-arg", f.psi_arg, "apply psi to q (the term) or index (n)")
        ->check(CLI::IsMember({"q", "index"}))
        ->capture_default_str();
    sub->add_option("--gamma", f.gamma, "shift gamma as a/b or decimal")->capture_default_str();
    sub->add_option("--nu", f.nu, "Fourier decay nu")->capture_default_str();
    sub->add_option("--A", f.A, "Fourier decay exponent A")->capture_default_str();
    sub->add_option("--eps", f.eps, "epsilon")->capture_default_str();
    sub->add_option("--delta", f.delta, "delta")->capture_default_str();
    sub->add_option("--nmax", f.nmax, "largest N (default grid geometric 1..nmax)")
        ->capture_default_str();
    sub->add_option("--C-growth", f.Cg, "growth constant C in log q_n > C n^(1/B)")->required();
    if (lacunary) {
      sub->add_option("--K0", f.K0, "lacunary constant K0")->required();
    } else {
      sub->add_option("--B", f.B, "growth exponent B")->required();
      sub->add_option("--alpha", f.alpha, "separation exponent alpha")->required();
    }
    f.flags.add(sub, 500);
  };
  auto* m0_lac = m0->add_subcommand("lacunary", "lacunary sequences");
  auto* m0_sep = m0->add_subcommand("separated", "alpha-separated sequences with growth");
  add_m0(m0_lac, lac, true);
  add_m0(m0_sep, sep, false);

  // normal ----------------------------------------------------------------
  auto* normal = app.add_subcommand("normal", "digit frequencies against the effective envelope");
  std::uint64_t n_d = 0, n_b = 10, n_nmax = 100000;
  std::optional<std::string> n_x;
  double n_eps = 1.0, n_delta = 0.1;
  SamplingFlags n_flags;
  normal->add_option("--d", n_d, "digit")->capture_default_str();
  normal->add_option("--b", n_b, "base")->capture_default_str();
  normal->add_option("--x", n_x, "explicit x as a/b or decimal (otherwise sampled)");
  normal->add_option("--eps", n_eps, "epsilon")->capture_default_str();
  normal->add_option("--delta", n_delta, "delta")->capture_default_str();
  normal->add_option("--nmax", n_nmax, "largest N (default grid geometric 1..nmax)")
      ->capture_default_str();
  n_flags.add(normal, 1000, false);

  // slln ------------------------------------------------------------------
  auto* slln = app.add_subcommand("slln", "effective strong law for bounded variables");
  std::string s_rv;
  double s_eps = 1.0, s_delta = 0.1;
  std::uint64_t s_nmax = 100000;
  SamplingFlags s_flags;
  slln->add_option("--rv", s_rv, "bernoulli:<p> | uniform:<a>:<b> | table:<path> | schedule:<l1>;<l2>...")
      ->required();
  slln->add_option("--eps", s_eps, "epsilon")->capture_default_str();
  slln->add_option("--delta", s_delta, "delta")->capture_default_str();
  slln->add_option("--nmax", s_nmax, "largest N (default grid geometric 1..nmax)")
      ->capture_default_str();
  s_flags.add(slln, 1000);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (constants->parsed()) {
      for (const auto& [key, opt] : copt)
        if (opt->count() > 0 && !applicable.at(theorem).count(key))
          throw UsageError(opt->get_name() + " is not applicable to --theorem " + theorem);
      auto need = [](const auto& v, const char* flag) {
        if (!v) throw UsageError(std::string("missing ") + flag);
        return *v;
      };
      ConstantsBundle b;
      b.theorem = theorem;
      if (theorem == "est") {
        const auto psi = parse_psi(need(c_psi, "--psi"));
        b = est_constants(need(c_eps, "--eps"), need(c_delta, "--delta"), psi)
                .bundle(psi.spec_text());
      } else if (theorem == "thm2" || theorem == "thm3") {
        const auto phi = parse_psi(need(c_psi, "--psi"));
        const double eps = need(c_eps, "--eps"), delta = need(c_delta, "--delta");
        const double K = need(c_K, "--K"), phi0 = need(c_phi0, "--phi0"), C = c_C.value_or(1.0);
        b.inputs = {Output::text_only("phi", phi.spec_text()), Output::of("eps", eps),
                    Output::of("delta", delta), Output::of("K", K), Output::of("Phi0", phi0),
                    Output::of("C", C)};
        if (theorem == "thm2") {
          const auto c = thm2_constants(eps, delta, K, phi0, C, partial_sums(phi));
          b.outputs = c.outputs();
          b.warnings = c.warnings;
        } else {
          const double f1 = c_f1.value_or(phi(1));
          b.inputs.push_back(Output::of("f1", f1));
          const auto c = thm3_constants(eps, delta, K, phi0, C, f1, partial_sums(phi));
          b.outputs = c.outputs();
          b.warnings = c.warnings;
        }
      } else if (theorem == "abh") {
        const double C = need(c_C, "--C"), delta = need(c_delta, "--delta");
        const double calC = need(c_calC, "--variance-constant");
        b.inputs = {Output::of("C", C), Output::of("delta", delta),
                    Output::of("variance_constant", calC)};
        b.outputs = {Output::of("k_C_delta", abh_k(C, delta, calC))};
        b.warnings = {"variance constant is user-supplied and unverified"};
      } else if (theorem == "m0") {
        M0Params p;
        p.nu = c_nu.value_or(p.nu);
        p.A = c_A.value_or(p.A);
        p.B = c_B.value_or(p.B);
        p.C = c_Cg.value_or(p.C);
        p.alpha = c_alpha.value_or(p.alpha);
        p.K0 = c_K0.value_or(p.K0);
        p.delta = c_delta.value_or(p.delta);
        const auto c = m0_constants(p);
        b.inputs = {Output::of("nu", p.nu),       Output::of("A", p.A),
                    Output::of("B", p.B),         Output::of("C_growth", p.C),
                    Output::of("alpha", p.alpha), Output::of("K0", p.K0),
                    Output::of("delta", p.delta)};
        b.outputs = c.outputs();
        for (const auto& z : c.zeta_calls)
          b.outputs.push_back(Output::of("zeta(" + z.label + ")", z.value));
        b.warnings = c.warnings;
      } else if (theorem == "tdelta") {
        const std::string w = c_omega.value_or("zero");
        Omega omega = omega_zero();
        if (w != "zero") {
          const auto parts = w.substr(0, 6) == "power:" ? w.substr(6) : std::string();
          const auto colon = parts.find(':');
          if (parts.empty() || colon == std::string::npos)
            throw UsageError("--omega must be zero or power:<coef>:<p>");
          omega = omega_power(effdio::detail::parse_number(parts.substr(0, colon), 6, "coef"),
                              effdio::detail::parse_number(parts.substr(colon + 1), 7 + colon, "p"));
        }
        const double nu = c_nu.value_or(1.0 / kPi), A = c_A.value_or(6.0), B = c_B.value_or(1.0),
                     Cg = c_Cg.value_or(1.0), delta = c_delta.value_or(0.1);
        b.inputs = {Output::text_only("omega", omega.name), Output::of("nu", nu),
                    Output::of("A", A), Output::of("B", B), Output::of("C_growth", Cg),
                    Output::of("delta", delta)};
        const auto t = t_delta_exact(omega, nu, A, B, Cg, delta);
        b.outputs = {Output::of("t_delta", static_cast<double>(t))};
      } else {  // slln
        const double eps = need(c_eps, "--eps"), delta = need(c_delta, "--delta");
        SllnConstants c;
        if (c_rv) {
          if (c_sigma2 || c_phi0 || c_F)
            throw UsageError("--rv excludes --sigma2, --phi0 and --F");
          const auto spec = parse_rv(*c_rv);
          b.inputs = {Output::text_only("rv", spec.text()), Output::of("eps", eps),
                      Output::of("delta", delta), Output::of("sigma2", spec.sigma2())};
          c = slln_constants(eps, delta, spec);
        } else {
          const double s2 = need(c_sigma2, "--sigma2"), phi0 = need(c_phi0, "--phi0"),
                       F = need(c_F, "--F");
          b.inputs = {Output::of("eps", eps), Output::of("delta", delta),
                      Output::of("sigma2", s2), Output::of("F", F)};
          c = slln_constants(eps, delta, s2, phi0, F);
        }
        b.outputs = c.outputs();
      }
      detail::emit(dump(to_json(b)), c_out, out);
      return 0;
    }

    if (count->parsed()) {
      const auto psi = parse_psi(k_psi);
      const auto x = parse_point(k_x);
      if (k_plot && !k_out) throw UsageError("--plot needs --out for the CSV path");
      if (k_plot && k_format != "csv") throw UsageError("--plot needs --format csv");
      std::vector<std::uint64_t> Qs;
      if (k_grid) {
        Qs = parse_grid(*k_grid).values();
        if (Qs.back() > k_qmax) throw UsageError("--grid stops beyond --qmax");
      } else if (k_qmax <= 1000) {
        for (std::uint64_t q = 1; q <= k_qmax; ++q) Qs.push_back(q);
      } else {
        Qs = GridSpec::geometric(1, k_qmax).values();
      }
      CountSeries series;
      if (k_kind == "s") {
        if (k_C || k_calC) throw UsageError("--C and --variance-constant apply to --kind sprime");
        std::optional<SchmidtConstants> c;
        if (k_eps || k_delta) c = est_constants(k_eps.value_or(1.0), k_delta.value_or(0.1), psi);
        const auto counts = count_S_at(x, Qs, psi);
        AggregateCache cache(psi);
        for (std::size_t i = 0; i < Qs.size(); ++i) {
          const double Psi = cache.psi_sum(Qs[i]);
          const double bound = c ? detail::as_double(schmidt_bound(*c, Psi))
                                 : std::numeric_limits<double>::infinity();
          series.push_back(make_record(Qs[i], counts[i], 2.0 * Psi, bound));
        }
      } else {
        if (k_eps) throw UsageError("--eps applies to --kind s");
        const auto phi = PhiTable::sieve(Qs.back());
        const auto counts = count_S_prime_at(x, Qs, psi, phi);
        AggregateCache cache(psi, &phi);
        std::optional<Count> k;
        if (k_C || k_calC)
          k = abh_k(k_C.value_or(9.0), k_delta.value_or(0.2),
                    k_calC ? *k_calC : throw UsageError("missing --variance-constant"));
        for (std::size_t i = 0; i < Qs.size(); ++i) {
          const double pp = cache.psi_prime_sum(Qs[i]);
          const double bound = k ? detail::as_double(abh_bound(*k, pp, k_C.value_or(9.0)))
                                 : std::numeric_limits<double>::infinity();
          series.push_back(make_record(Qs[i], counts[i], pp, bound));
        }
      }
      detail::emit(k_format == "csv" ? series_csv(series) : dump(series_json(series)), k_out, out);
      if (k_plot) write_file(*k_plot, gnuplot_script(*k_out));
      return 0;
    }

    if (verify->parsed()) {
      if (v_schmidt->parsed()) {
        const auto psi = parse_psi(vs_psi);
        const auto& f = vs_flags;
        return report_exit(mc_check_schmidt(psi, vs_eps, vs_delta, f.samples,
                                            f.grid_or(GridSpec::geometric(10, 1'000'000)),
                                            *f.seed, f.threads),
                           f.out, out);
      }
      if (v_abh->parsed()) {
        const auto psi = parse_psi(va_psi);
        const auto& f = va_flags;
        const auto grid = f.grid_or(GridSpec::geometric(10, 100'000));
        const auto phi = PhiTable::sieve(grid.values().back());
        return report_exit(
            mc_check_abh(psi, va_C, va_delta, va_calC, f.samples, grid, *f.seed, phi, f.threads),
            f.out, out);
      }
      if (v_l41->parsed()) {
        const bool single = l41_M || l41_N || l41_k;
        const bool sweep = l41_nmax || l41_kmax;
        if (single == sweep) throw UsageError("give either --M --N --k or --nmax --kmax");
        if (single) {
          if (!(l41_M && l41_N && l41_k)) throw UsageError("single check needs --M, --N and --k");
          const auto c = check_lemma41(*l41_M, *l41_N, *l41_k);
          out << dump(detail::lemma_json("lemma41", {{"M", *l41_M}, {"N", *l41_N}, {"k", *l41_k}}, c));
          return c.holds ? 0 : 1;
        }
        if (!(l41_nmax && l41_kmax)) throw UsageError("sweep needs --nmax and --kmax");
        const auto s = sweep_lemma41(*l41_nmax, *l41_kmax);
        Json j;
        j["theorem"] = "lemma41";
        j["inputs"] = {{"nmax", *l41_nmax}, {"kmax", *l41_kmax}};
        j["holds"] = s.holds;
        j["pairs"] = s.pairs;
        j["min_upper_slack"] = s.min_upper_slack;
        j["failures"] = s.failures;
        out << dump(j);
        return s.holds ? 0 : 1;
      }
      if (v_l42->parsed()) {
        const auto psi = parse_psi(l42_psi);
        const auto c = check_lemma42(psi, l42_M, l42_N, l42_k);
        out << dump(detail::lemma_json(
            "lemma42", {{"psi", psi.spec_text()}, {"M", l42_M}, {"N", l42_N}, {"k", l42_k}}, c));
        return c.holds ? 0 : 1;
      }
      if (v_l43->parsed()) {
        const auto psi = parse_psi(l43_psi);
        const auto s = sweep_lemma43(psi, l43_N);
        Json j;
        j["theorem"] = "lemma43";
        j["inputs"] = {{"psi", psi.spec_text()}, {"N", l43_N}};
        j["holds"] = s.holds;
        j["sum_at_N"] = s.final_sum;
        j["min_upper_slack"] = s.min_upper_slack;
        j["constant"] = lemma43_constant();
        j["failures"] = s.failures;
        out << dump(j);
        return s.holds ? 0 : 1;
      }
    }

    if (m0->parsed()) {
      const bool lacunary = m0_lac->parsed();
      const M0Flags& f = lacunary ? lac : sep;
      SequenceCheck in;
      in.seq = parse_sequence(f.seq);
      if (lacunary) {
        in.seq.lacunary(*f.K0).growth(1.0, *f.Cg);
      } else {
        in.seq.growth(*f.B, *f.Cg).separated(*f.alpha);
      }
      in.psi = parse_psi(f.psi);
      in.psi_arg = f.psi_arg == "q" ? PsiArgument::kTerm : PsiArgument::kIndex;
      std::tie(in.inhom.gamma_num, in.inhom.gamma_den) = parse_exact_fraction(f.gamma);
      in.inhom.nu = f.nu;
      in.inhom.A = f.A;
      in.eps = f.eps;
      in.m0.delta = f.delta;
      const auto grid = f.flags.grid_or(GridSpec::geometric(1, f.nmax));
      const auto r = lacunary ? mc_check_m0_lacunary(in, f.flags.samples, grid, *f.flags.seed,
                                                     f.flags.threads)
                              : mc_check_m0_separated(in, f.flags.samples, grid, *f.flags.seed,
                                                      f.flags.threads);
      return report_exit(r, f.flags.out, out);
    }

    if (normal->parsed()) {
      std::optional<RationalPoint> x;
      if (n_x) x = parse_point(*n_x);
      if (!x && !n_flags.seed) throw UsageError("sampled x needs --seed");
      const auto grid = n_flags.grid_or(GridSpec::geometric(1, n_nmax));
      return report_exit(check_normal(x, n_d, n_b, grid, n_eps, n_delta, n_flags.samples,
                                      n_flags.seed.value_or(0), n_flags.threads),
                         n_flags.out, out);
    }

    if (slln->parsed()) {
      const auto spec = parse_rv(s_rv);
      const auto grid = s_flags.grid_or(GridSpec::geometric(1, s_nmax));
      return report_exit(
          simulate_slln(spec, s_eps, s_delta, grid, s_flags.samples, *s_flags.seed, s_flags.threads),
          s_flags.out, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace effdio::cli
