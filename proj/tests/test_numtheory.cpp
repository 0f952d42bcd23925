#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <numeric>
#include <random>

#include "effdio/numtheory.hpp"

using namespace effdio;
namespace mp = boost::multiprecision;

namespace {

std::uint64_t naive_phi(std::uint64_t n) {
  std::uint64_t c = 0;
  for (std::uint64_t m = 1; m <= n; ++m) c += std::gcd(m, n) == 1;
  return c;
}

std::uint64_t naive_restricted(double bound, std::uint64_t n) {
  std::uint64_t c = 0;
  for (std::uint64_t m = 1; m <= n; ++m) c += static_cast<double>(std::gcd(m, n)) <= bound;
  return c;
}

mp::cpp_rational exact(const FixedPointFraction& x) {
  mp::cpp_int bits = static_cast<std::uint64_t>(x.bits() >> 64);
  bits <<= 64;
  bits += static_cast<std::uint64_t>(x.bits());
  return mp::cpp_rational(bits, mp::cpp_int(1) << 128);
}

/// sum_{n<N} n^-s plus the trapezoid tail N^(1-s)/(s-1) + N^-s/2.
double brute_zeta(double s) {
  const std::uint64_t N = 2'000'000;
  long double acc = 0;
  for (std::uint64_t n = N - 1; n >= 1; --n) acc += std::pow(static_cast<long double>(n), -s);
  const long double n = N;
  acc += std::pow(n, 1 - s) / (s - 1) + std::pow(n, -s) / 2;
  return static_cast<double>(acc);
}

}  // namespace

TEST(PhiTable, MatchesNaiveTotient) {
  const auto t = PhiTable::sieve(2000);
  ASSERT_EQ(t.limit(), 2000u);
  for (std::uint64_t n = 1; n <= 2000; ++n) ASSERT_EQ(t[n], naive_phi(n)) << n;
}

TEST(PhiTable, SegmentAgreesWithLinearSieve) {
  const auto t = PhiTable::sieve(200'000);
  const auto primes = PhiTable::primes_upto(500);
  const auto seg = PhiTable::segment(150'000, 150'500, primes);
  for (std::uint64_t i = 0; i < seg.size(); ++i) ASSERT_EQ(seg[i], t[150'000 + i]);
}

TEST(PhiTable, RangeChecks) {
  const auto t = PhiTable::sieve(10);
  EXPECT_EQ(t.at(10), 4u);
  EXPECT_THROW(t.at(11), DomainError);
}

TEST(RestrictedTotient, MatchesBruteForce) {
  for (std::uint64_t n = 1; n <= 300; ++n)
    for (std::uint64_t k : {1u, 2u, 3u, 6u, 10u, 50u, 400u}) {
      ASSERT_EQ(restricted_totient(k, n), naive_restricted(static_cast<double>(k), n))
          << "k=" << k << " n=" << n;
    }
  EXPECT_EQ(restricted_totient(1, 12), naive_phi(12));
  EXPECT_EQ(restricted_totient(2, 6), 4u);
  EXPECT_EQ(restricted_totient(7, 6), 6u);
  EXPECT_EQ(restricted_totient_real(2.5, 6), 4u);
}

TEST(RestrictedTotient, DivisorCount) {
  EXPECT_EQ(restricted_divisor_count(12, 4.0), 4u);  // 1 2 3 4
  EXPECT_EQ(restricted_divisor_count(36, 100.0), 9u);
}

TEST(ScaledThreshold, ExactAtPowersOfTwo) {
  const u128 quarter = u128{1} << 126;
  EXPECT_EQ(detail::scaled_threshold(0.25, 128, true), quarter);
  EXPECT_EQ(detail::scaled_threshold(0.25, 128, false), quarter + 1);
  EXPECT_EQ(detail::scaled_threshold(0.0, 128, true), u128{0});
  EXPECT_EQ(detail::scaled_threshold(0.0, 128, false), u128{1});
}

TEST(FixedPoint, FromRationalIsFloorOfExactValue) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const std::uint64_t den = rng() % 1'000'000 + 1, num = rng() % den;
    const auto x = FixedPointFraction::from_rational(num, den);
    const auto diff = mp::cpp_rational(num, den) - exact(x);
    ASSERT_GE(diff, 0);
    ASSERT_LT(diff, mp::cpp_rational(1, mp::cpp_int(1) << 128));
  }
}

TEST(FixedPoint, FromDoubleIsExact) {
  for (double v : {0.0, 0.5, 0.1, 0.6180339887498949, 1e-300, 0.9999999999999999}) {
    const auto x = FixedPointFraction::from_double(v);
    if (v >= 0x1p-128) {
      EXPECT_EQ(exact(x), mp::cpp_rational(v));
    }
  }
  EXPECT_THROW(FixedPointFraction::from_double(1.0), DomainError);
}

TEST(FixedPoint, DistanceBoundaries) {
  const auto x = FixedPointFraction::from_rational(1, 4);
  EXPECT_FALSE(x.dist_less(1, 0.25));  // strict
  EXPECT_TRUE(x.dist_less(1, 0.2500001));
  const auto g = FixedPointFraction::from_rational(0, 1);
  EXPECT_TRUE(x.dist_shift_leq(1, g, 0.25));  // non-strict
  EXPECT_DOUBLE_EQ(x.distance(3), 0.25);
}

TEST(FixedPoint, NearestReportsBothOnTies) {
  const auto x = FixedPointFraction::from_rational(1, 2);
  const auto [p0, p1] = x.nearest(3);  // 1.5
  EXPECT_EQ(p0, 1u);
  ASSERT_TRUE(p1.has_value());
  EXPECT_EQ(*p1, 2u);
  const auto y = FixedPointFraction::from_rational(1, 3);
  const auto [r0, r1] = y.nearest(5);  // 1.666
  EXPECT_EQ(r0, 2u);
  EXPECT_FALSE(r1.has_value());
}

TEST(FixedPoint, FracAndFloorAgreeWithExactProduct) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    const auto x = FixedPointFraction::from_bits((u128{rng()} << 64) | rng());
    const std::uint64_t q = rng() % 10'000'000 + 1;
    const auto prod = exact(x) * q;
    const mp::cpp_int fl = mp::numerator(prod) / mp::denominator(prod);
    ASSERT_EQ(fl, x.floor_times(q));
  }
}

TEST(RationalPoint, ExactDistances) {
  const RationalPoint x(1, 3);
  EXPECT_FALSE(x.dist_less(2, 1.0 / 3.0 - 1e-17));
  EXPECT_NEAR(x.distance(2), 1.0 / 3.0, 1e-16);
  EXPECT_TRUE(RationalPoint(1, 2).dist_less(2, 1e-300));
  const RationalPoint g(1, 3);
  // 4/3 - 1/3 = 1
  EXPECT_TRUE(x.dist_shift_leq(4, g, 0.0));
  EXPECT_FALSE(x.dist_shift_leq(2, g, 0.01));
  const auto [p0, p1] = RationalPoint(1, 2).nearest(3);
  EXPECT_EQ(p0, 1u);
  EXPECT_EQ(p1.value_or(0), 2u);
}

TEST(RationalPoint, RatioCompare) {
  EXPECT_TRUE(RationalPoint::ratio_compare(1, 4, 0.25, false));
  EXPECT_FALSE(RationalPoint::ratio_compare(1, 4, 0.25, true));
  EXPECT_TRUE(RationalPoint::ratio_compare(1, 3, 0.3333333333333334, true));
  EXPECT_FALSE(RationalPoint::ratio_compare(1, 3, 0.3333333333333333, false));
}

TEST(Zeta, KnownValues) {
  const double pi = 3.14159265358979323846;
  EXPECT_NEAR(zeta(2.0), pi * pi / 6.0, 1e-13);
  EXPECT_NEAR(zeta(4.0), std::pow(pi, 4) / 90.0, 1e-13);
  EXPECT_NEAR(zeta(3.0), 1.2020569031595942, 1e-13);
  EXPECT_THROW(zeta(1.0), DomainError);
  EXPECT_THROW(zeta(0.5), DomainError);
}

TEST(Zeta, AgreesWithDirectSummation) {
  for (double s : {1.5, 2.5, 3.0, 5.0, 5.5, 12.0})
    EXPECT_NEAR(zeta(s), brute_zeta(s), 2e-12) << "s=" << s;
}

TEST(Zeta, LargeArgument) {
  EXPECT_NEAR(zeta(80.0), 1.0, 1e-20);
}
