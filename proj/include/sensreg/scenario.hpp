// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "sensreg/geometry.hpp"

namespace sensreg {

using Velocity = Eigen::Vector2d;

struct SensorConfig {
  int id = 1;  // 1..M
  CartesianPoint position;
  double period_s = 1.0;
  double offset_s = 0.0;
  double true_range_bias_m = 0.0;
  double true_azimuth_bias_rad = 0.0;
};

struct TargetInit {
  CartesianPoint mean_position;
  Velocity mean_velocity = Velocity::Zero();
  double position_var_m2 = 0.0;
  double velocity_var_m2ps2 = 0.0;
};

/// White-acceleration density q (m^2/s^3) of the nearly-constant-velocity model.
struct MotionNoise {
  double q = 0.0;
};

struct MeasurementNoise {
  double sigma_rho_m = 0.0;
  double sigma_phi_rad = 0.0;
};

struct ScheduleEvent {
  double t = 0.0;
  int sensor = 0;  // 0-based index into the sensor list
};

/// Time-ordered, collision-free observation instants, one sensor each.
struct Schedule {
  std::vector<ScheduleEvent> events;

  std::size_t size() const { return events.size(); }
  double gap(std::size_t k) const { return events[k + 1].t - events[k].t; }
};

struct TrueTrack {
  std::vector<CartesianPoint> position;
  std::vector<Velocity> velocity;
};

struct Measurement {
  double t = 0.0;
  int sensor = 0;  // 0-based
  PolarPair z;
};

struct MeasurementSeries {
  std::vector<Measurement> measurements;
  int sensor_count = 0;

  std::size_t size() const { return measurements.size(); }
  const Measurement& operator[](std::size_t k) const { return measurements[k]; }
  double gap(std::size_t k) const { return measurements[k + 1].t - measurements[k].t; }

  /// Number of measurements contributed by each sensor.
  std::vector<int> counts_per_sensor() const;

  /// Measurements of one sensor in time order, relabelled as sensor 0.
  MeasurementSeries for_sensor(int sensor) const;
};

/// Everything the estimators see: the series plus the known sensor positions and
/// the debiasing factor for the configured azimuth noise.
struct RegistrationInput {
  MeasurementSeries series;
  std::vector<CartesianPoint> sensor_positions;
  DebiasFactor lambda;

  int sensor_count() const { return static_cast<int>(sensor_positions.size()); }
};

struct Scenario {
  std::vector<SensorConfig> sensors;
  TargetInit target;
  double horizon_s = 0.0;

  std::vector<CartesianPoint> sensor_positions() const;
};

/// Two timestamps closer than this are treated as the same instant.
inline constexpr double kScheduleCollisionTol = 1e-9;

/// Merges every sensor's arithmetic sequence offset + n * period (n = 0..floor((horizon - offset) / period)).
/// Sensors must carry ids 1..M in order. Throws ValidationError on collisions or bad periods.
Schedule build_schedule(std::span<const SensorConfig> sensors, double horizon_s);

/// Nearly-constant-velocity propagation along the schedule. Deterministic in `seed`.
TrueTrack simulate_track(const TargetInit& init, MotionNoise noise, const Schedule& schedule, std::uint64_t seed);

/// z_k = polar(xi_k - p) - true bias + w_k. Deterministic in `seed`.
MeasurementSeries generate_measurements(const TrueTrack& track, std::span<const SensorConfig> sensors,
                                        const Schedule& schedule, MeasurementNoise noise, std::uint64_t seed);

struct SimulationResult {
  Schedule schedule;
  TrueTrack track;
  MeasurementSeries series;
};

/// Full pipeline with independent track and measurement sub-streams derived from `seed`.
SimulationResult simulate(const Scenario& scenario, MotionNoise motion, MeasurementNoise meas, std::uint64_t seed);

/// Packs a simulated series with the scenario geometry for the estimators.
RegistrationInput make_input(const Scenario& scenario, MeasurementSeries series, MeasurementNoise meas);

/// SplitMix64-derived seed for sub-stream `stream` of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace sensreg
