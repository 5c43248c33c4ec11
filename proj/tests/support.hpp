// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "sensreg/geometry.hpp"
#include "sensreg/scenario.hpp"

namespace sensreg::fixtures {

/// Three sensors, 5 s period, staggered starts, 98 s of observation.
inline Scenario table1_scenario() {
  Scenario s;
  s.horizon_s = 98.0;
  s.sensors = {
      {1, {-5000.0, -10000.0}, 5.0, 0.0, -800.0, deg_to_rad(2.0)},
      {2, {5000.0, -10000.0}, 5.0, 1.5, 600.0, deg_to_rad(-3.0)},
      {3, {0.0, 10000.0}, 5.0, 3.0, 800.0, deg_to_rad(-2.0)},
  };
  s.target.mean_position = {-10000.0, 0.0};
  s.target.mean_velocity = Velocity(200.0, 0.0);
  return s;
}

/// Noise-free straight-line run of `s`.
inline RegistrationInput noiseless_input(const Scenario& s) {
  const auto sim = simulate(s, MotionNoise{0.0}, MeasurementNoise{0.0, 0.0}, 7);
  return make_input(s, sim.series, MeasurementNoise{0.0, 0.0});
}

/// Noisy Table 1 run with initial-state variances 10 q and q.
inline RegistrationInput noisy_table1(double sigma_rho_m, double sigma_phi_deg, double q, std::uint64_t seed) {
  Scenario s = table1_scenario();
  s.target.position_var_m2 = 10.0 * q;
  s.target.velocity_var_m2ps2 = q;
  const MeasurementNoise noise{sigma_rho_m, deg_to_rad(sigma_phi_deg)};
  const auto sim = simulate(s, MotionNoise{q}, noise, seed);
  return make_input(s, sim.series, noise);
}

inline Eigen::VectorXd true_range_biases(const Scenario& s) {
  Eigen::VectorXd b(static_cast<Eigen::Index>(s.sensors.size()));
  for (std::size_t m = 0; m < s.sensors.size(); ++m) b(static_cast<Eigen::Index>(m)) = s.sensors[m].true_range_bias_m;
  return b;
}

inline Eigen::VectorXd true_azimuth_biases(const Scenario& s) {
  Eigen::VectorXd b(static_cast<Eigen::Index>(s.sensors.size()));
  for (std::size_t m = 0; m < s.sensors.size(); ++m) {
    b(static_cast<Eigen::Index>(m)) = s.sensors[m].true_azimuth_bias_rad;
  }
  return b;
}

/// Random nondegenerate geometry: sensors within +-50 km, target crossing the area at
/// 150-300 m/s, biases within +-1.5 km and +-5 deg, 10 s period with distinct offsets.
inline Scenario random_scenario(std::mt19937_64& rng, int sensors, int per_sensor = 10) {
  std::uniform_real_distribution<double> pos(-50000.0, 50000.0);
  std::uniform_real_distribution<double> rb(-1500.0, 1500.0);
  std::uniform_real_distribution<double> ab(-5.0, 5.0);
  std::uniform_real_distribution<double> speed(150.0, 300.0);
  std::uniform_real_distribution<double> heading(-kPi, kPi);

  Scenario s;
  const double period = 10.0;
  s.horizon_s = period * (per_sensor - 1) + period * 0.9;
  for (int m = 0; m < sensors; ++m) {
    const double offset = period * (m + 0.5 * std::uniform_real_distribution<double>(0.1, 0.9)(rng)) / sensors;
    s.sensors.push_back({m + 1, {pos(rng), pos(rng)}, period, offset, rb(rng), deg_to_rad(ab(rng))});
  }
  const double h = heading(rng);
  const double v = speed(rng);
  s.target.mean_velocity = Velocity(v * std::cos(h), v * std::sin(h));
  // start so the track passes near the middle of the sensor field
  s.target.mean_position = {-0.5 * s.horizon_s * s.target.mean_velocity.x() + 0.2 * pos(rng),
                            -0.5 * s.horizon_s * s.target.mean_velocity.y() + 0.2 * pos(rng)};
  return s;
}

inline double max_abs(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

inline double max_angle_error(const Eigen::VectorXd& est, const Eigen::VectorXd& truth) {
  double e = 0.0;
  for (Eigen::Index i = 0; i < est.size(); ++i) e = std::max(e, std::abs(angle_diff(est(i), truth(i))));
  return e;
}

}  // namespace sensreg::fixtures
