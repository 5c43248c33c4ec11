// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>

#include "sensreg/scenario.hpp"

namespace sensreg {

/// Columns: t_seconds,sensor_id,range_m,azimuth_rad. Sensor ids are written 1-based
/// and values with 17 significant digits so a re-read is exact.
void write_series_csv(std::ostream& os, const MeasurementSeries& series);
void write_series_csv(const std::string& path, const MeasurementSeries& series);

/// Inverse of write_series_csv. `sensor_count` bounds the accepted ids.
/// Throws ValidationError with the offending line number.
MeasurementSeries read_series_csv(std::istream& is, int sensor_count);
MeasurementSeries read_series_csv(const std::string& path, int sensor_count);

}  // namespace sensreg
