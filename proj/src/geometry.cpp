// SPDX-License-Identifier: Apache-2.0

#include "sensreg/geometry.hpp"

#include <cmath>

#include "sensreg/errors.hpp"

namespace sensreg {

double wrap_angle(double rad) {
  double w = std::remainder(rad, 2.0 * kPi);
  // remainder() lands on -pi for odd multiples of pi; the convention keeps +pi.
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

double angle_diff(double a, double b) { return wrap_angle(a - b); }

DebiasFactor DebiasFactor::from_sigma(double sigma_phi_rad) {
  if (!(sigma_phi_rad >= 0.0) || !std::isfinite(sigma_phi_rad)) {
    throw ValidationError("azimuth noise std must be finite and non-negative");
  }
  return DebiasFactor(std::exp(-0.5 * sigma_phi_rad * sigma_phi_rad));
}

CartesianPoint to_cartesian(PolarPair p) { return {p.range * std::cos(p.azimuth), p.range * std::sin(p.azimuth)}; }

PolarPair to_polar(CartesianPoint c) {
  if (c.x == 0.0 && c.y == 0.0) {
    throw DegenerateGeometryError("polar transform undefined at the origin");
  }
  return {std::hypot(c.x, c.y), wrap_angle(std::atan2(c.y, c.x))};
}

CartesianPoint debiased_to_cartesian(PolarPair p, DebiasFactor lam) {
  const double r = p.range * lam.inverse();
  return {r * std::cos(p.azimuth), r * std::sin(p.azimuth)};
}

}  // namespace sensreg
