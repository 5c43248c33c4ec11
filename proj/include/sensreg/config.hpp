// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sensreg/bcd.hpp"
#include "sensreg/scenario.hpp"

namespace sensreg {

/// One point of a noise sweep, in SI units.
struct NoisePoint {
  double sigma_rho_m = 0.0;
  double sigma_phi_rad = 0.0;
  double q = 0.0;  // m^2/s^3

  MeasurementNoise measurement() const { return {sigma_rho_m, sigma_phi_rad}; }
  MotionNoise motion() const { return {q}; }
};

enum class Estimator { bcd_sdr, bcd_gp, two_stage };

const char* to_string(Estimator e);
Estimator parse_estimator(const std::string& name);

struct ExperimentConfig {
  Scenario scenario;  // target variances are filled per noise point by scenario_at()
  /// Explicit initial-state variances; when absent they default to 10 q and q.
  std::optional<double> position_var_m2;
  std::optional<double> velocity_var_m2ps2;
  std::vector<NoisePoint> noise_grid;
  int num_runs = 1;
  std::uint64_t base_seed = 0;
  std::vector<Estimator> estimators{Estimator::bcd_sdr};
  BcdConfig bcd;
  int threads = 0;  // 0 = hardware concurrency
  std::string output_dir;

  /// Scenario with the initial-state variances resolved for `noise`.
  Scenario scenario_at(const NoisePoint& noise) const;
};

/// Parses and validates a JSON experiment description. Lengths given in km and angles in
/// degrees are converted to meters and radians here. Unknown keys are rejected.
/// Throws ValidationError naming the offending field (or the line of a JSON syntax error).
ExperimentConfig parse_config(const std::string& json_text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

}  // namespace sensreg
