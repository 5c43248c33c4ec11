// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sensreg/config.hpp"

namespace sensreg {

enum class BiasKind { range, azimuth };

/// "range_m" or "azimuth_deg": the unit the RMSE is reported in.
const char* to_string(BiasKind k);

/// One estimator applied to one simulated run.
struct RunRecord {
  std::size_t noise_index = 0;
  int run = 0;
  Estimator estimator = Estimator::bcd_sdr;
  bool ok = false;
  std::string error;
  Eigen::VectorXd range_error_m;    // estimate - truth
  Eigen::VectorXd azimuth_error_rad;  // wrapped estimate - truth
  double seconds = 0.0;
  int iterations = 0;
  bool all_rank_one = false;
  bool flagged = false;
};

struct RmseRow {
  Estimator estimator = Estimator::bcd_sdr;
  std::size_t noise_index = 0;
  NoisePoint noise;
  int sensor_id = 1;
  BiasKind kind = BiasKind::range;
  double rmse = 0.0;  // meters or degrees, per `kind`
  int used_runs = 0;
  int excluded_runs = 0;
};

struct TimingRow {
  Estimator estimator = Estimator::bcd_sdr;
  std::size_t noise_index = 0;
  double mean_seconds = 0.0;
};

struct MonteCarloReport {
  int sensor_count = 0;
  std::vector<NoisePoint> noise_grid;
  std::vector<Estimator> estimators;
  std::vector<RunRecord> runs;  // ordered by (noise, run, estimator)
  std::vector<RmseRow> rmse;    // ordered by (estimator, noise, sensor, kind)
  std::vector<TimingRow> timing;

  /// Throws std::out_of_range when the combination is absent.
  const RmseRow& find(Estimator e, std::size_t noise_index, int sensor_id, BiasKind kind) const;
};

/// Seeds run r with base_seed + r at every noise point. Estimator failures are recorded and
/// excluded from the RMSE. Results are merged in run order, so the report does not depend
/// on the thread count (except the wall-clock columns).
MonteCarloReport run_monte_carlo(const ExperimentConfig& cfg);

/// sqrt(mean(e^2)); zero for an empty input.
double rmse(const std::vector<double>& errors);

}  // namespace sensreg
