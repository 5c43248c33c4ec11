// SPDX-License-Identifier: Apache-2.0

#include "sensreg/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "sensreg/errors.hpp"

namespace sensreg {

namespace {

constexpr const char* kRmseHeader =
    "estimator,noise_sigma_rho_m,noise_sigma_phi_deg,q,sensor_id,bias_kind,rmse,excluded_runs";

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os << content;
  if (!os) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

void write_rmse_csv(std::ostream& os, const MonteCarloReport& report) {
  os << kRmseHeader << '\n' << std::setprecision(17);
  for (const auto& r : report.rmse) {
    os << to_string(r.estimator) << ',' << r.noise.sigma_rho_m << ',' << rad_to_deg(r.noise.sigma_phi_rad) << ','
       << r.noise.q << ',' << r.sensor_id << ',' << to_string(r.kind) << ',' << r.rmse << ',' << r.excluded_runs
       << '\n';
  }
}

void write_timing_csv(std::ostream& os, const MonteCarloReport& report) {
  os << "M,noise_sigma_rho_m,noise_sigma_phi_deg,q";
  for (const auto e : report.estimators) os << ',' << to_string(e);
  os << '\n' << std::setprecision(6);
  for (std::size_t n = 0; n < report.noise_grid.size(); ++n) {
    const auto& np = report.noise_grid[n];
    os << report.sensor_count << ',' << np.sigma_rho_m << ',' << rad_to_deg(np.sigma_phi_rad) << ',' << np.q;
    for (const auto e : report.estimators) {
      const auto it = std::find_if(report.timing.begin(), report.timing.end(),
                                   [&](const TimingRow& t) { return t.estimator == e && t.noise_index == n; });
      os << ',' << (it != report.timing.end() ? it->mean_seconds : 0.0);
    }
    os << '\n';
  }
}

void write_runs_csv(std::ostream& os, const MonteCarloReport& report) {
  os << "estimator,noise_index,run,ok,iterations,seconds,all_rank_one,flagged";
  for (int m = 1; m <= report.sensor_count; ++m) os << ",range_error_m_" << m << ",azimuth_error_deg_" << m;
  os << ",error\n" << std::setprecision(17);
  for (const auto& r : report.runs) {
    os << to_string(r.estimator) << ',' << r.noise_index << ',' << r.run << ',' << (r.ok ? 1 : 0) << ','
       << r.iterations << ',' << r.seconds << ',' << (r.all_rank_one ? 1 : 0) << ',' << (r.flagged ? 1 : 0);
    for (int m = 0; m < report.sensor_count; ++m) {
      if (r.ok) {
        os << ',' << r.range_error_m(m) << ',' << rad_to_deg(r.azimuth_error_rad(m));
      } else {
        os << ",,";
      }
    }
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    os << ',' << err << '\n';
  }
}

std::string render_rmse_svg(const MonteCarloReport& report, int sensor_id, BiasKind kind) {
  constexpr double W = 640, H = 420, L = 80, R = 170, T = 40, B = 70;
  const double pw = W - L - R, ph = H - T - B;
  const std::size_t npts = report.noise_grid.size();

  double ymax = 0.0;
  for (const auto& r : report.rmse) {
    if (r.sensor_id == sensor_id && r.kind == kind) ymax = std::max(ymax, r.rmse);
  }
  if (!(ymax > 0.0)) ymax = 1.0;
  ymax *= 1.1;

  auto xpos = [&](std::size_t i) { return L + (npts <= 1 ? pw / 2 : pw * static_cast<double>(i) / (npts - 1)); };
  auto ypos = [&](double v) { return T + ph * (1.0 - v / ymax); };

  std::ostringstream s;
  s << std::setprecision(6);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 - R / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">Sensor " << sensor_id
    << (kind == BiasKind::range ? " range bias RMSE" : " azimuth bias RMSE") << "</text>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << T + ph << "\" x2=\"" << L + pw << "\" y2=\"" << T + ph << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << T + ph << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = ymax * i / 5.0;
    s << "<line x1=\"" << L - 4 << "\" y1=\"" << ypos(v) << "\" x2=\"" << L << "\" y2=\"" << ypos(v) << "\" stroke=\"black\"/>";
    s << "<text x=\"" << L - 8 << "\" y=\"" << ypos(v) + 4 << "\" text-anchor=\"end\">" << v << "</text>\n";
  }
  for (std::size_t i = 0; i < npts; ++i) {
    s << "<line x1=\"" << xpos(i) << "\" y1=\"" << T + ph << "\" x2=\"" << xpos(i) << "\" y2=\"" << T + ph + 4 << "\" stroke=\"black\"/>";
    s << "<text x=\"" << xpos(i) << "\" y=\"" << T + ph + 18 << "\" text-anchor=\"middle\" font-size=\"10\">"
      << report.noise_grid[i].sigma_rho_m << " m, " << rad_to_deg(report.noise_grid[i].sigma_phi_rad) << "&#176;</text>\n";
  }
  s << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 20 << "\" text-anchor=\"middle\">noise level (sigma_rho, sigma_phi)</text>\n";
  s << "<text transform=\"translate(20," << T + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">RMSE ["
    << (kind == BiasKind::range ? "m" : "deg") << "]</text>\n";

  for (std::size_t e = 0; e < report.estimators.size(); ++e) {
    const Estimator est = report.estimators[e];
    const char* color = kPalette[e % std::size(kPalette)];
    std::ostringstream pts;
    pts << std::setprecision(6);
    for (std::size_t i = 0; i < npts; ++i) {
      const double v = report.find(est, i, sensor_id, kind).rmse;
      pts << xpos(i) << ',' << ypos(v) << ' ';
      s << "<circle cx=\"" << xpos(i) << "\" cy=\"" << ypos(v) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"" << pts.str() << "\"/>\n";
    const double ly = T + 10 + 20.0 * static_cast<double>(e);
    s << "<line x1=\"" << L + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << L + pw + 40 << "\" y2=\"" << ly
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>";
    s << "<text x=\"" << L + pw + 46 << "\" y=\"" << ly + 4 << "\">" << to_string(est) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::vector<std::string> emit_report(const MonteCarloReport& report, ReportFormat format, const std::string& dir) {
  if (report.rmse.empty() || report.noise_grid.empty()) throw ValidationError("cannot emit an empty report");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());

  std::vector<std::string> written;
  const std::filesystem::path base(dir);
  if (format == ReportFormat::csv) {
    std::ostringstream rmse_os, timing_os, runs_os;
    write_rmse_csv(rmse_os, report);
    write_timing_csv(timing_os, report);
    write_runs_csv(runs_os, report);
    for (const auto& [name, content] : {std::pair{"rmse.csv", rmse_os.str()}, std::pair{"timing.csv", timing_os.str()},
                                        std::pair{"runs.csv", runs_os.str()}}) {
      write_file(base / name, content);
      written.push_back((base / name).string());
    }
  } else {
    for (int m = 1; m <= report.sensor_count; ++m) {
      for (const BiasKind kind : {BiasKind::range, BiasKind::azimuth}) {
        const auto path = base / ("rmse_sensor" + std::to_string(m) + "_" +
                                  (kind == BiasKind::range ? "range" : "azimuth") + ".svg");
        write_file(path, render_rmse_svg(report, m, kind));
        written.push_back(path.string());
      }
    }
  }
  return written;
}

std::vector<RmseRow> read_rmse_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kRmseHeader) throw ValidationError("rmse csv: unexpected header");
  std::vector<RmseRow> rows;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 8) throw ValidationError("rmse csv line " + std::to_string(line_no) + ": expected 8 columns");
    try {
      RmseRow r;
      r.estimator = parse_estimator(f[0]);
      r.noise.sigma_rho_m = std::stod(f[1]);
      r.noise.sigma_phi_rad = deg_to_rad(std::stod(f[2]));
      r.noise.q = std::stod(f[3]);
      r.sensor_id = std::stoi(f[4]);
      if (f[5] == "range_m") {
        r.kind = BiasKind::range;
      } else if (f[5] == "azimuth_deg") {
        r.kind = BiasKind::azimuth;
      } else {
        throw ValidationError("unknown bias kind '" + f[5] + "'");
      }
      r.rmse = std::stod(f[6]);
      r.excluded_runs = std::stoi(f[7]);
      rows.push_back(r);
    } catch (const std::logic_error&) {
      throw ValidationError("rmse csv line " + std::to_string(line_no) + ": malformed number");
    }
  }
  return rows;
}

std::string estimate_to_json(const BiasEstimate& est) {
  nlohmann::json j;
  j["sensors"] = nlohmann::json::array();
  for (Eigen::Index m = 0; m < est.delta_rho.size(); ++m) {
    j["sensors"].push_back({{"id", m + 1},
                            {"range_bias_m", est.delta_rho(m)},
                            {"azimuth_bias_rad", est.delta_phi(m)},
                            {"azimuth_bias_deg", rad_to_deg(est.delta_phi(m))}});
  }
  j["velocity_mps"] = {est.velocity.x(), est.velocity.y()};
  j["objective_trace"] = est.objective_trace;
  j["iterations"] = est.iterations;
  j["converged"] = est.converged;
  j["flagged"] = est.flagged;
  auto& steps = j["azimuth_steps"] = nlohmann::json::array();
  for (const auto& s : est.steps) {
    steps.push_back({{"iteration", s.iteration},
                     {"tightness", to_string(s.tightness)},
                     {"eig_ratio", s.eig_ratio},
                     {"accepted", s.accepted}});
  }
  return j.dump(2);
}

}  // namespace sensreg
