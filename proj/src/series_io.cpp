// SPDX-License-Identifier: Apache-2.0

#include "sensreg/series_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "sensreg/errors.hpp"

namespace sensreg {

namespace {

constexpr const char* kHeader = "t_seconds,sensor_id,range_m,azimuth_rad";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

template <typename T>
T parse_field(const std::string& s, int line_no) {
  T value{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError("series csv line " + std::to_string(line_no) + ": cannot parse '" + s + "'");
  }
  return value;
}

}  // namespace

void write_series_csv(std::ostream& os, const MeasurementSeries& series) {
  os << kHeader << '\n' << std::setprecision(17);
  for (const auto& m : series.measurements) {
    os << m.t << ',' << (m.sensor + 1) << ',' << m.z.range << ',' << m.z.azimuth << '\n';
  }
}

void write_series_csv(const std::string& path, const MeasurementSeries& series) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_series_csv(os, series);
  if (!os) throw ValidationError("failed writing '" + path + "'");
}

MeasurementSeries read_series_csv(std::istream& is, int sensor_count) {
  MeasurementSeries series;
  series.sensor_count = sensor_count;
  std::string line;
  int line_no = 0;
  if (!std::getline(is, line)) throw ValidationError("series csv is empty");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) throw ValidationError(std::string("series csv line 1: expected header '") + kHeader + "'");

  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 4) throw ValidationError("series csv line " + std::to_string(line_no) + ": expected 4 columns");
    Measurement m;
    m.t = parse_field<double>(f[0], line_no);
    const int id = parse_field<int>(f[1], line_no);
    if (id < 1 || id > sensor_count) {
      throw ValidationError("series csv line " + std::to_string(line_no) + ": sensor id " + std::to_string(id) +
                            " outside 1.." + std::to_string(sensor_count));
    }
    m.sensor = id - 1;
    m.z.range = parse_field<double>(f[2], line_no);
    m.z.azimuth = parse_field<double>(f[3], line_no);
    if (!series.measurements.empty() && !(m.t > series.measurements.back().t)) {
      throw ValidationError("series csv line " + std::to_string(line_no) + ": timestamps must strictly increase");
    }
    series.measurements.push_back(m);
  }
  return series;
}

MeasurementSeries read_series_csv(const std::string& path, int sensor_count) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "'");
  return read_series_csv(is, sensor_count);
}

}  // namespace sensreg
