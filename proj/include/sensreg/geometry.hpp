// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <numbers>

namespace sensreg {

inline constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into (-pi, pi].
double wrap_angle(double rad);

/// Signed difference a - b wrapped into (-pi, pi].
double angle_diff(double a, double b);

/// Range (m) and azimuth (rad) as seen from a sensor.
struct PolarPair {
  double range = 0.0;
  double azimuth = 0.0;
};

struct CartesianPoint {
  double x = 0.0;
  double y = 0.0;

  friend CartesianPoint operator+(CartesianPoint a, CartesianPoint b) { return {a.x + b.x, a.y + b.y}; }
  friend CartesianPoint operator-(CartesianPoint a, CartesianPoint b) { return {a.x - b.x, a.y - b.y}; }
  friend bool operator==(const CartesianPoint&, const CartesianPoint&) = default;
};

/// Multiplicative correction exp(-sigma_phi^2 / 2) that makes the polar to
/// Cartesian conversion unbiased under Gaussian azimuth noise.
class DebiasFactor {
 public:
  /// Identity factor (noise-free azimuth).
  DebiasFactor() = default;

  /// Throws ValidationError for negative or non-finite sigma.
  static DebiasFactor from_sigma(double sigma_phi_rad);

  double lambda() const { return lambda_; }
  double inverse() const { return 1.0 / lambda_; }

 private:
  explicit DebiasFactor(double lambda) : lambda_(lambda) {}
  double lambda_ = 1.0;
};

inline DebiasFactor debias_factor(double sigma_phi_rad) { return DebiasFactor::from_sigma(sigma_phi_rad); }

CartesianPoint to_cartesian(PolarPair p);

/// Throws DegenerateGeometryError at the origin. Azimuth is wrapped into (-pi, pi].
PolarPair to_polar(CartesianPoint c);

/// (rho cos phi, rho sin phi) / lambda.
CartesianPoint debiased_to_cartesian(PolarPair p, DebiasFactor lam);

}  // namespace sensreg
