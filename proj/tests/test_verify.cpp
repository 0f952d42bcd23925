#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "effdio/verify.hpp"

using namespace effdio;

namespace {

bool same_report(const ViolationReport& a, const ViolationReport& b) {
  return a.violators == b.violators && a.min_margin == b.min_margin &&
         a.violator_x == b.violator_x && a.wilson.hi == b.wilson.hi && a.pass == b.pass;
}

}  // namespace

TEST(Wilson, ClosedForm) {
  const double z = kZ99, z2 = z * z;
  const auto zero = wilson_interval(0, 1000);
  EXPECT_EQ(zero.lo, 0.0);
  EXPECT_NEAR(zero.hi, z2 / (1000 + z2), 1e-15);
  const double n = 200, p = 30 / n;
  const double center = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  const auto mid = wilson_interval(30, 200);
  EXPECT_NEAR(mid.lo, center - half, 1e-15);
  EXPECT_NEAR(mid.hi, center + half, 1e-15);
  const auto mirror = wilson_interval(170, 200);
  EXPECT_NEAR(mirror.lo, 1 - mid.hi, 1e-15);
  EXPECT_THROW(wilson_interval(3, 2), DomainError);
}

TEST(Rng, CounterModeStreams) {
  SampleRng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  const auto va = a.bits();
  EXPECT_EQ(va, b.bits());
  EXPECT_NE(va, c.bits());
  EXPECT_NE(va, d.bits());
  SampleRng r(1, 0);
  std::vector<int> hist(6, 0);
  for (int i = 0; i < 60000; ++i) ++hist[r.below(6)];
  for (int h : hist) EXPECT_NEAR(h, 10000, 500);
}

TEST(ParallelFor, CoversEveryIndexAndPropagates) {
  std::vector<int> hits(1000, 0);
  parallel_for(1000, 8, [&](std::uint64_t i) { hits[i] += 1; });
  EXPECT_EQ(std::accumulate(hits.begin(), hits.end(), 0), 1000);
  EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  EXPECT_THROW(parallel_for(100, 4, [](std::uint64_t i) { require(i != 57, "boom"); }),
               DomainError);
}

TEST(Grid, ValuesAndParsing) {
  const auto g = parse_grid("geom:10:1000000");
  const auto v = g.values();
  EXPECT_EQ(v.front(), 10u);
  EXPECT_EQ(v.back(), 1000000u);
  EXPECT_EQ(v.size(), 24u);
  EXPECT_TRUE(std::is_sorted(v.begin(), v.end()));
  EXPECT_EQ(std::adjacent_find(v.begin(), v.end()), v.end());
  EXPECT_EQ(parse_grid("lin:1:40:40").values().size(), 40u);
  EXPECT_EQ(parse_grid("geom:1:5:100").values(), (std::vector<std::uint64_t>{1, 2, 3, 4, 5}));
  EXPECT_THROW(parse_grid("log:1:5"), DomainError);
  EXPECT_THROW(parse_grid("geom:1"), DomainError);
  EXPECT_THROW(parse_grid("geom:5:1").values(), DomainError);
}

TEST(Schmidt, DeterministicAcrossThreads) {
  const auto psi = parse_psi("min:0.4,inv:1");
  const auto grid = GridSpec::geometric(10, 10000, 8);
  const auto a = mc_check_schmidt(psi, 1.0, 0.1, 100, grid, 42, 1);
  const auto b = mc_check_schmidt(psi, 1.0, 0.1, 100, grid, 42, 4);
  EXPECT_TRUE(same_report(a, b));
  EXPECT_EQ(a.violators, 0u);
  EXPECT_TRUE(a.pass);
  EXPECT_THROW(mc_check_schmidt(psi, 1.0, 0.1, 99, grid, 42), DomainError);
  EXPECT_THROW(mc_check_schmidt(parse_psi("const:0"), 1.0, 0.1, 100, grid, 42), DomainError);
}

TEST(Abh, ZeroPsiHasNoViolators) {
  const auto phi = PhiTable::sieve(1000);
  const auto r = mc_check_abh(parse_psi("const:0"), 9.0, 0.2, 1.0, 50,
                              GridSpec::geometric(10, 1000, 5), 1, phi);
  EXPECT_EQ(r.violators, 0u);
  EXPECT_TRUE(r.pass);
  EXPECT_NE(std::find(r.warnings.begin(), r.warnings.end(),
                      "variance constant is user-supplied and unverified"),
            r.warnings.end());
}

TEST(Abh, DeltaOnePassesVacuously) {
  const auto phi = PhiTable::sieve(1000);
  const auto r = mc_check_abh(parse_psi("const:0.49"), 9.0, 1.0, 1e-9, 50,
                              GridSpec::geometric(10, 1000, 5), 1, phi);
  EXPECT_TRUE(r.pass);
}

TEST(Abh, PrimeSupportedPsiMatchesNaiveCounts) {
  const auto phi = PhiTable::sieve(300);
  std::vector<double> v(300, 0.0);
  for (std::uint64_t q = 2; q <= 300; ++q) {
    bool prime = true;
    for (std::uint64_t d = 2; d * d <= q; ++d) prime = prime && q % d;
    if (prime) v[q - 1] = 0.4;
  }
  const auto psi = ApproxFunction::table(v, "primes");
  std::vector<std::uint64_t> pts(300);
  std::iota(pts.begin(), pts.end(), 1);
  const auto s = coprime_setup(psi, phi, pts);
  for (std::uint64_t i = 0; i < 20; ++i) {
    SampleRng rng(5, i);
    const auto x = rng.fraction();
    std::vector<double> dev;
    coprime_deviations(x, s, pts, dev);
    for (std::uint64_t Q : {1u, 2u, 50u, 300u})
      ASSERT_NEAR(dev[Q - 1] + s.psi_prime[Q - 1],
                  static_cast<double>(count_S_prime(x, Q, psi, phi)), 1e-9);
  }
}

TEST(Abh, EstimateIsPositiveAndDeterministic) {
  const auto phi = PhiTable::sieve(2000);
  const auto grid = GridSpec::geometric(10, 2000, 6);
  const auto psi = parse_psi("const:0.49");
  const double a = estimate_abh_constant(psi, 9.0, 40, grid, 3, phi, 1);
  const double b = estimate_abh_constant(psi, 9.0, 40, grid, 3, phi, 3);
  EXPECT_GT(a, 0.0);
  EXPECT_EQ(a, b);
}

TEST(M0, LacunaryPowersOfTwo) {
  SequenceCheck in;
  in.seq = SequenceSpec::powers(2);
  in.seq.lacunary(2.0).growth(1.0, 0.69);
  in.psi = ApproxFunction::custom([](std::uint64_t n) { return 1.0 / (double(n) * n); }, "n^-2",
                                  true, false);
  in.psi_arg = PsiArgument::kIndex;
  in.m0.delta = 0.2;
  const auto grid = GridSpec::linear(1, 40, 40);
  const auto r = mc_check_m0_lacunary(in, 100, grid, 9, 1);
  EXPECT_TRUE(r.pass);
  bool saw_c1 = false;
  for (const auto& o : r.constants)
    if (o.name == "c1") saw_c1 = o.number && *o.number == 22.0;
  EXPECT_TRUE(saw_c1);
  EXPECT_TRUE(same_report(r, mc_check_m0_lacunary(in, 100, grid, 9, 3)));
  SequenceCheck bare = in;
  bare.seq = SequenceSpec::powers(2);
  EXPECT_THROW(mc_check_m0_lacunary(bare, 10, grid, 9), DomainError);
}

TEST(M0, SeparatedRuns) {
  SequenceCheck in;
  in.seq = SequenceSpec::powers(3);
  in.seq.growth(1.0, 1.0).separated(0.5);
  in.psi = ApproxFunction::constant(0.5);
  in.m0.delta = 0.2;
  const auto r = mc_check_m0_separated(in, 50, GridSpec::linear(1, 20, 20), 4, 2);
  EXPECT_EQ(r.theorem, "m0-separated");
  EXPECT_EQ(r.samples, 50u);
  EXPECT_FALSE(r.constants.empty());
}

TEST(Normal, ExplicitThirdIsSingleSample) {
  const auto r = check_normal(RationalPoint(1, 3), 0, 2, GridSpec::geometric(1, 10000, 10), 1.0,
                              0.1, 1000, 0);
  EXPECT_EQ(r.samples, 1u);
  EXPECT_EQ(r.violators, 0u);
  const auto s = check_normal(std::nullopt, 7, 10, GridSpec::geometric(1, 1000, 5), 1.0, 0.1,
                              50, 8, 2);
  EXPECT_EQ(s.samples, 50u);
  EXPECT_EQ(s.violators, 0u);
}

TEST(Lemma41, Examples) {
  const auto c = check_lemma41(1, 100, 1);
  EXPECT_TRUE(c.holds);
  EXPECT_GT(c.upper_slack, 0.0);
  const auto big_k = check_lemma41(3, 50, 60);
  EXPECT_TRUE(big_k.holds);
  EXPECT_EQ(big_k.lower_slack, 0.0);
}

TEST(Lemma41, SweepMatchesSingleChecks) {
  const auto s = sweep_lemma41(120, 6);
  EXPECT_TRUE(s.holds);
  EXPECT_EQ(s.pairs, 6u * 119u);
  double min_single = std::numeric_limits<double>::infinity();
  for (std::uint64_t k = 1; k <= 6; ++k)
    for (std::uint64_t N = 2; N <= 120; N += 1)
      for (std::uint64_t M = 1; M < N; M += 7) min_single = std::min(min_single, check_lemma41(M, N, k).upper_slack);
  EXPECT_LE(s.min_upper_slack, min_single + 1e-12);
}

TEST(Lemma42, Examples) {
  EXPECT_TRUE(check_lemma42(parse_psi("inv:0.5"), 2, 500, 10).holds);
  EXPECT_TRUE(check_lemma42(parse_psi("const:0.3"), 1, 300, 1).holds);
  const auto c = check_lemma42(parse_psi("const:0.3"), 5, 400, 7);
  EXPECT_TRUE(c.holds);
  EXPECT_GE(c.upper_slack, 0.0);
}

TEST(Lemma43, ConstantAndExamples) {
  EXPECT_NEAR(lemma43_constant(), 40.56633883, 1e-7);
  EXPECT_LT(lemma43_constant(), kLemma43Bound);
  const auto c = check_lemma43(parse_psi("inv:0.5"), 10000);
  EXPECT_TRUE(c.holds);
  EXPECT_GT(c.upper_slack, 10.0);
  const auto full = sweep_lemma43(parse_psi("const:0.5"), 2000);
  EXPECT_TRUE(full.holds);
  EXPECT_EQ(full.final_sum, 0.0);
  const auto zero = check_lemma43(parse_psi("const:0"), 100);
  EXPECT_TRUE(zero.holds);
  EXPECT_EQ(zero.lower_slack, 0.0);
}
