// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "sensreg/errors.hpp"
#include "sensreg/geometry.hpp"

using namespace sensreg;

TEST(ToCartesian, AxisAligned) {
  auto a = to_cartesian({1.0, 0.0});
  EXPECT_DOUBLE_EQ(a.x, 1.0);
  EXPECT_DOUBLE_EQ(a.y, 0.0);
  auto b = to_cartesian({2.0, kPi / 2});
  EXPECT_NEAR(b.x, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(b.y, 2.0);
}

TEST(ToCartesian, Diagonal) {
  auto c = to_cartesian({std::sqrt(2.0), kPi / 4});
  EXPECT_NEAR(c.x, 1.0, 1e-15);
  EXPECT_NEAR(c.y, 1.0, 1e-15);
}

TEST(ToPolar, AxisAndDiagonal) {
  auto a = to_polar({0.0, -3.0});
  EXPECT_DOUBLE_EQ(a.range, 3.0);
  EXPECT_DOUBLE_EQ(a.azimuth, -kPi / 2);
  auto b = to_polar({1.0, 1.0});
  EXPECT_DOUBLE_EQ(b.range, std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(b.azimuth, kPi / 4);
}

TEST(ToPolar, OriginIsDegenerate) { EXPECT_THROW(to_polar({0.0, 0.0}), DegenerateGeometryError); }

TEST(ToPolar, NegativeXAxisMapsToPlusPi) {
  EXPECT_DOUBLE_EQ(to_polar({-2.0, 0.0}).azimuth, kPi);
  EXPECT_DOUBLE_EQ(to_polar({-2.0, -0.0}).azimuth, kPi);
}

TEST(ToPolar, RoundTripRandom) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> r(1e-3, 1e6), a(-3 * kPi, 3 * kPi);
  for (int i = 0; i < 1000; ++i) {
    const PolarPair p{r(rng), a(rng)};
    const PolarPair back = to_polar(to_cartesian(p));
    EXPECT_LT(std::abs(back.range - p.range), 1e-12 * p.range);
    EXPECT_LT(std::abs(angle_diff(back.azimuth, p.azimuth)), 1e-12);
    EXPECT_GT(back.azimuth, -kPi);
    EXPECT_LE(back.azimuth, kPi);
  }
}

TEST(WrapAngle, HalfOpenInterval) {
  EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
  EXPECT_NEAR(wrap_angle(3 * kPi / 2), -kPi / 2, 1e-15);
  EXPECT_NEAR(wrap_angle(-5 * kPi / 2), -kPi / 2, 1e-15);
  EXPECT_DOUBLE_EQ(wrap_angle(0.25), 0.25);
}

TEST(AngleDiff, WrapsAcrossSeam) {
  EXPECT_NEAR(rad_to_deg(angle_diff(deg_to_rad(179.0), deg_to_rad(-179.0))), -2.0, 1e-12);
  EXPECT_NEAR(rad_to_deg(angle_diff(deg_to_rad(-179.0), deg_to_rad(179.0))), 2.0, 1e-12);
}

TEST(DebiasFactor, Values) {
  EXPECT_EQ(debias_factor(0.0).lambda(), 1.0);
  const double s = 0.1 * kPi / 180.0;
  EXPECT_NEAR(debias_factor(s).lambda(), std::exp(-s * s / 2), 1e-16);
  EXPECT_NEAR(debias_factor(s).lambda(), 0.99999848, 5e-9);
  EXPECT_NEAR(debias_factor(1.0).lambda(), 0.606531, 1e-6);
  EXPECT_DOUBLE_EQ(debias_factor(1.0).inverse(), std::exp(0.5));
}

TEST(DebiasFactor, RejectsNegative) {
  EXPECT_THROW(debias_factor(-1e-3), ValidationError);
  EXPECT_THROW(debias_factor(std::nan("")), ValidationError);
}

TEST(DebiasFactor, MonotoneDecreasing) {
  double prev = 1.0;
  for (double s = 0.01; s < 3.0; s += 0.01) {
    const double l = debias_factor(s).lambda();
    EXPECT_LT(l, prev);
    EXPECT_GT(l, 0.0);
    prev = l;
  }
}

TEST(DebiasedToCartesian, Scaling) {
  auto a = debiased_to_cartesian({1.0, 0.0}, DebiasFactor{});
  EXPECT_DOUBLE_EQ(a.x, 1.0);
  EXPECT_DOUBLE_EQ(a.y, 0.0);
  // lambda = 0.5 has sigma = sqrt(2 ln 2)
  auto half = debias_factor(std::sqrt(2.0 * std::log(2.0)));
  ASSERT_NEAR(half.lambda(), 0.5, 1e-15);
  auto b = debiased_to_cartesian({2.0, kPi}, half);
  EXPECT_NEAR(b.x, -4.0, 1e-14);
  EXPECT_NEAR(b.y, 0.0, 1e-14);
}

TEST(DebiasedToCartesian, CompensatesAzimuthNoiseInMean) {
  // measured z = polar(p) - bias + w; debiased(z + bias) averages back to p
  const CartesianPoint p{12000.0, -7000.0};
  const double drho = -800.0, dphi = deg_to_rad(2.0);
  const double sr = 50.0, sp = deg_to_rad(3.0);
  const auto lam = debias_factor(sp);
  const PolarPair truth = to_polar(p);

  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  const int n = 1'000'000;
  double sx = 0, sy = 0, sxx = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    const PolarPair z{truth.range - drho + sr * n01(rng), truth.azimuth - dphi + sp * n01(rng)};
    const auto g = debiased_to_cartesian({z.range + drho, z.azimuth + dphi}, lam);
    sx += g.x;
    sy += g.y;
    sxx += g.x * g.x;
    syy += g.y * g.y;
  }
  const double mx = sx / n, my = sy / n;
  const double se_x = std::sqrt((sxx / n - mx * mx) / n), se_y = std::sqrt((syy / n - my * my) / n);
  EXPECT_LT(std::abs(mx - p.x), 3 * se_x);
  EXPECT_LT(std::abs(my - p.y), 3 * se_y);

  // the uncorrected conversion is biased by many standard errors at this noise level
  const double shrink = (1.0 - lam.lambda()) * std::hypot(p.x, p.y);
  EXPECT_GT(shrink, 20 * std::max(se_x, se_y));
}
