#include <gtest/gtest.h>

#include <cmath>

#include "effdio/core.hpp"

using namespace effdio;

TEST(Magnitude, ArithmeticMatchesPlainDoubles) {
  const auto a = Magnitude::from_value(3.0), b = Magnitude::from_value(5.0);
  EXPECT_NEAR((a * b).value(), 15.0, 1e-12);
  EXPECT_NEAR((a / b).value(), 0.6, 1e-15);
  EXPECT_NEAR((a + b).value(), 8.0, 1e-12);
  EXPECT_NEAR(a.pow(2.5).value(), std::pow(3.0, 2.5), 1e-12);
  EXPECT_TRUE(a < b);
  EXPECT_TRUE(max(a, b) == b);
}

TEST(Magnitude, ZeroAndInfinity) {
  const auto z = Magnitude::zero();
  EXPECT_TRUE(z.is_zero());
  EXPECT_EQ(z.value(), 0.0);
  EXPECT_TRUE((z * Magnitude::from_value(7)).is_zero());
  EXPECT_DOUBLE_EQ((z + Magnitude::from_value(7)).value(), 7.0);
  EXPECT_THROW(Magnitude::from_value(-1.0), DomainError);
  EXPECT_THROW(Magnitude::from_value(1.0) / z, DomainError);
  EXPECT_TRUE(Magnitude::infinite().is_infinite());
  EXPECT_EQ(Magnitude::infinite().to_string(), "inf");
}

TEST(Magnitude, BeyondDoubleRange) {
  const auto big = Magnitude::from_log(6000.0);
  EXPECT_FALSE(big.representable());
  EXPECT_TRUE(std::isinf(big.value()));
  EXPECT_TRUE(big.bounds(1e308));
  // exp(6000) = 10^2605.7...
  const std::string s = big.to_string();
  EXPECT_NE(s.find("e+2605"), std::string::npos) << s;
  EXPECT_NEAR((big + big).log(), 6000.0 + std::log(2.0), 1e-9);
}

TEST(Magnitude, BoundsIsNonStrict) {
  const auto m = Magnitude::from_value(4.0);
  EXPECT_TRUE(m.bounds(4.0));
  EXPECT_FALSE(m.bounds(4.000001));
  EXPECT_TRUE(m.bounds(-3.0));
}

TEST(Count, ExactAndApproximate) {
  const auto c = Count::of(42);
  EXPECT_TRUE(c.is_exact());
  EXPECT_EQ(c.to_string(), "42");
  const auto a = Count::approximate(Magnitude::from_log(5000.0));
  EXPECT_FALSE(a.is_exact());
  EXPECT_EQ(a.to_string().front(), '~');
}

TEST(CompensatedSum, RecoversLostLowBits) {
  CompensatedSum s;
  s += 1e16;
  for (int i = 0; i < 1000; ++i) s += 1.0;
  s += -1e16;
  EXPECT_EQ(s.value(), 1000.0);
}

TEST(Require, ThrowsDomainError) {
  EXPECT_NO_THROW(require(true, "x"));
  EXPECT_THROW(require(false, "boom"), DomainError);
  EXPECT_THROW(throw UnboundedError("u"), DomainError);
}
