// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "sensreg/errors.hpp"
#include "sensreg/report.hpp"
#include "support.hpp"

using namespace sensreg;

namespace {

MonteCarloReport one_point_report(std::vector<Estimator> est = {Estimator::bcd_sdr}) {
  ExperimentConfig cfg;
  cfg.scenario = fixtures::table1_scenario();
  cfg.noise_grid = {{20.0, deg_to_rad(0.1), 0.05}};
  cfg.num_runs = 3;
  cfg.base_seed = 5;
  cfg.estimators = std::move(est);
  cfg.threads = 1;
  return run_monte_carlo(cfg);
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("sensreg_report_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(RmseCsv, CardinalityAndHeader) {
  const auto report = one_point_report();
  std::stringstream ss;
  write_rmse_csv(ss, report);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "estimator,noise_sigma_rho_m,noise_sigma_phi_deg,q,sensor_id,bias_kind,rmse,excluded_runs");
  int rows = 0;
  while (std::getline(ss, line)) rows += !line.empty();
  EXPECT_EQ(rows, 6);
}

TEST(RmseCsv, RoundTripFullPrecision) {
  const auto report = one_point_report({Estimator::bcd_sdr, Estimator::two_stage});
  std::stringstream ss;
  write_rmse_csv(ss, report);
  const auto rows = read_rmse_csv(ss);
  ASSERT_EQ(rows.size(), report.rmse.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].estimator, report.rmse[i].estimator);
    EXPECT_EQ(rows[i].sensor_id, report.rmse[i].sensor_id);
    EXPECT_EQ(rows[i].kind, report.rmse[i].kind);
    EXPECT_EQ(rows[i].rmse, report.rmse[i].rmse);
    EXPECT_EQ(rows[i].noise.sigma_rho_m, report.rmse[i].noise.sigma_rho_m);
    EXPECT_EQ(rows[i].excluded_runs, report.rmse[i].excluded_runs);
  }
}

TEST(TimingCsv, OneColumnPerEstimator) {
  const auto report = one_point_report({Estimator::bcd_sdr, Estimator::bcd_gp});
  std::stringstream ss;
  write_timing_csv(ss, report);
  std::string header, row;
  std::getline(ss, header);
  std::getline(ss, row);
  EXPECT_EQ(header, "M,noise_sigma_rho_m,noise_sigma_phi_deg,q,bcd-sdr,bcd-gp");
  EXPECT_EQ(row.substr(0, 2), "3,");
}

TEST(EmitReport, WritesCsvAndSvg) {
  const auto report = one_point_report({Estimator::bcd_sdr, Estimator::two_stage});
  const auto dir = scratch("emit");
  const auto csv = emit_report(report, ReportFormat::csv, dir.string());
  EXPECT_EQ(csv.size(), 3u);
  for (const auto& f : csv) EXPECT_TRUE(std::filesystem::exists(f)) << f;
  const auto svg = emit_report(report, ReportFormat::svg, dir.string());
  EXPECT_EQ(svg.size(), 6u);
  std::ifstream is(dir / "rmse_sensor2_azimuth.svg");
  std::stringstream content;
  content << is.rdbuf();
  const std::string s = content.str();
  EXPECT_EQ(s.rfind("<svg", 0), 0u);
  EXPECT_NE(s.find("RMSE [deg]"), std::string::npos);
  EXPECT_NE(s.find("noise level"), std::string::npos);
  EXPECT_NE(s.find("two-stage"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(EmitReport, EmptyReportRejected) {
  EXPECT_THROW(emit_report(MonteCarloReport{}, ReportFormat::csv, scratch("empty").string()), ValidationError);
}

TEST(EmitReport, UnwritablePath) {
  const auto report = one_point_report();
  const auto file = scratch("blocker");
  std::ofstream(file.string()) << "x";
  EXPECT_THROW(emit_report(report, ReportFormat::csv, (file / "sub").string()), IoError);
  std::filesystem::remove_all(file);
}

TEST(EstimateJson, Fields) {
  const auto in = fixtures::noisy_table1(10.0, 0.05, 0.05, 1);
  const auto est = run_bcd(in);
  const auto j = nlohmann::json::parse(estimate_to_json(est));
  ASSERT_EQ(j["sensors"].size(), 3u);
  EXPECT_EQ(j["sensors"][0]["id"], 1);
  EXPECT_DOUBLE_EQ(j["sensors"][2]["range_bias_m"].get<double>(), est.delta_rho(2));
  EXPECT_DOUBLE_EQ(j["velocity_mps"][0].get<double>(), est.velocity.x());
  EXPECT_EQ(j["iterations"], est.iterations);
  EXPECT_EQ(j["objective_trace"].size(), est.objective_trace.size());
}
