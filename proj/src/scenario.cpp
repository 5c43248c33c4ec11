// SPDX-License-Identifier: Apache-2.0

#include "sensreg/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "sensreg/errors.hpp"

namespace sensreg {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

void check_sensor_ids(std::span<const SensorConfig> sensors) {
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    if (sensors[i].id != static_cast<int>(i) + 1) {
      throw ValidationError("sensor ids must be 1..M in order; found id " + std::to_string(sensors[i].id) +
                            " at position " + std::to_string(i + 1));
    }
  }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ull));
}

std::vector<int> MeasurementSeries::counts_per_sensor() const {
  std::vector<int> counts(static_cast<std::size_t>(sensor_count), 0);
  for (const auto& m : measurements) ++counts[static_cast<std::size_t>(m.sensor)];
  return counts;
}

MeasurementSeries MeasurementSeries::for_sensor(int sensor) const {
  MeasurementSeries out;
  out.sensor_count = 1;
  for (const auto& m : measurements) {
    if (m.sensor == sensor) out.measurements.push_back({m.t, 0, m.z});
  }
  return out;
}

std::vector<CartesianPoint> Scenario::sensor_positions() const {
  std::vector<CartesianPoint> out;
  out.reserve(sensors.size());
  for (const auto& s : sensors) out.push_back(s.position);
  return out;
}

Schedule build_schedule(std::span<const SensorConfig> sensors, double horizon_s) {
  if (sensors.empty()) throw ValidationError("schedule needs at least one sensor");
  check_sensor_ids(sensors);

  Schedule schedule;
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const auto& s = sensors[i];
    if (!(s.period_s > 0.0) || !std::isfinite(s.period_s)) {
      throw ValidationError("sensor " + std::to_string(s.id) + ": period must be positive");
    }
    if (!(s.offset_s >= 0.0)) {
      throw ValidationError("sensor " + std::to_string(s.id) + ": offset must be non-negative");
    }
    if (!(horizon_s > s.offset_s)) {
      throw ValidationError("sensor " + std::to_string(s.id) + ": horizon must exceed the offset");
    }
    const auto last = static_cast<long>(std::floor((horizon_s - s.offset_s) / s.period_s + 1e-9));
    for (long n = 0; n <= last; ++n) {
      schedule.events.push_back({s.offset_s + static_cast<double>(n) * s.period_s, static_cast<int>(i)});
    }
  }

  std::stable_sort(schedule.events.begin(), schedule.events.end(),
                   [](const ScheduleEvent& a, const ScheduleEvent& b) { return a.t < b.t; });
  for (std::size_t k = 0; k + 1 < schedule.size(); ++k) {
    if (schedule.gap(k) < kScheduleCollisionTol) {
      throw ValidationError("sensors " + std::to_string(schedule.events[k].sensor + 1) + " and " +
                            std::to_string(schedule.events[k + 1].sensor + 1) + " observe at the same instant t=" +
                            std::to_string(schedule.events[k].t));
    }
  }
  return schedule;
}

TrueTrack simulate_track(const TargetInit& init, MotionNoise noise, const Schedule& schedule, std::uint64_t seed) {
  if (schedule.events.empty()) throw ValidationError("cannot simulate a track on an empty schedule");
  if (noise.q < 0.0 || init.position_var_m2 < 0.0 || init.velocity_var_m2ps2 < 0.0) {
    throw ValidationError("motion variances must be non-negative");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  const std::size_t K = schedule.size();
  TrueTrack track;
  track.position.resize(K);
  track.velocity.resize(K);

  const double sc = std::sqrt(init.position_var_m2);
  const double sv = std::sqrt(init.velocity_var_m2ps2);
  track.position[0] = {init.mean_position.x + sc * normal(rng), init.mean_position.y + sc * normal(rng)};
  track.velocity[0] = init.mean_velocity + sv * Velocity(normal(rng), normal(rng));

  for (std::size_t k = 0; k + 1 < K; ++k) {
    const double T = schedule.gap(k);
    // Cholesky factor of q [[T^3/3, T^2/2], [T^2/2, T]], applied per axis.
    const double l11 = std::sqrt(noise.q * T * T * T / 3.0);
    const double l21 = std::sqrt(noise.q) * std::sqrt(3.0 * T) / 2.0;
    const double l22 = std::sqrt(noise.q * T) / 2.0;

    Velocity n_pos, n_vel;
    for (int axis = 0; axis < 2; ++axis) {
      const double a = normal(rng);
      const double b = normal(rng);
      n_pos[axis] = l11 * a;
      n_vel[axis] = l21 * a + l22 * b;
    }
    const Velocity& v = track.velocity[k];
    track.position[k + 1] = {track.position[k].x + T * v.x() + n_pos.x(), track.position[k].y + T * v.y() + n_pos.y()};
    track.velocity[k + 1] = v + n_vel;
  }
  return track;
}

MeasurementSeries generate_measurements(const TrueTrack& track, std::span<const SensorConfig> sensors,
                                        const Schedule& schedule, MeasurementNoise noise, std::uint64_t seed) {
  if (track.position.size() != schedule.size()) {
    throw ValidationError("track length does not match the schedule");
  }
  if (noise.sigma_rho_m < 0.0 || noise.sigma_phi_rad < 0.0) {
    throw ValidationError("measurement noise std must be non-negative");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  MeasurementSeries series;
  series.sensor_count = static_cast<int>(sensors.size());
  series.measurements.reserve(schedule.size());
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const auto& ev = schedule.events[k];
    const auto& s = sensors[static_cast<std::size_t>(ev.sensor)];
    PolarPair rel;
    try {
      rel = to_polar(track.position[k] - s.position);
    } catch (const DegenerateGeometryError&) {
      throw DegenerateGeometryError("target coincides with sensor " + std::to_string(s.id) + " at t=" +
                                    std::to_string(ev.t));
    }
    const double w_rho = noise.sigma_rho_m * normal(rng);
    const double w_phi = noise.sigma_phi_rad * normal(rng);
    const PolarPair z{rel.range - s.true_range_bias_m + w_rho,
                      wrap_angle(rel.azimuth - s.true_azimuth_bias_rad + w_phi)};
    series.measurements.push_back({ev.t, ev.sensor, z});
  }
  return series;
}

SimulationResult simulate(const Scenario& scenario, MotionNoise motion, MeasurementNoise meas, std::uint64_t seed) {
  SimulationResult out;
  out.schedule = build_schedule(scenario.sensors, scenario.horizon_s);
  out.track = simulate_track(scenario.target, motion, out.schedule, derive_seed(seed, 0));
  out.series = generate_measurements(out.track, scenario.sensors, out.schedule, meas, derive_seed(seed, 1));
  return out;
}

RegistrationInput make_input(const Scenario& scenario, MeasurementSeries series, MeasurementNoise meas) {
  return {std::move(series), scenario.sensor_positions(), DebiasFactor::from_sigma(meas.sigma_phi_rad)};
}

}  // namespace sensreg
