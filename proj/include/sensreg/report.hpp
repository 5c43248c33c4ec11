// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sensreg/bcd.hpp"
#include "sensreg/monte_carlo.hpp"

namespace sensreg {

enum class ReportFormat { csv, svg };

/// Columns: estimator,noise_sigma_rho_m,noise_sigma_phi_deg,q,sensor_id,bias_kind,rmse,excluded_runs.
void write_rmse_csv(std::ostream& os, const MonteCarloReport& report);

/// Wall-clock means laid out as one row per noise point and one column per estimator.
void write_timing_csv(std::ostream& os, const MonteCarloReport& report);

/// Per-run diagnostics: errors, iterations, time, tightness.
void write_runs_csv(std::ostream& os, const MonteCarloReport& report);

/// RMSE against noise-point index, one line per estimator.
std::string render_rmse_svg(const MonteCarloReport& report, int sensor_id, BiasKind kind);

/// Writes rmse.csv, timing.csv and runs.csv (csv) or one rmse_sensor<m>_<kind>.svg per
/// sensor and bias kind (svg) into `dir`, creating it if needed. Returns the written paths.
/// Throws ValidationError on an empty report and IoError when a file cannot be written.
std::vector<std::string> emit_report(const MonteCarloReport& report, ReportFormat format, const std::string& dir);

/// Parses rmse.csv back into rows (noise points carry only what the CSV holds).
std::vector<RmseRow> read_rmse_csv(std::istream& is);

/// BiasEstimate as JSON (ids 1-based, azimuth in both degrees and radians).
std::string estimate_to_json(const BiasEstimate& est);

}  // namespace sensreg
