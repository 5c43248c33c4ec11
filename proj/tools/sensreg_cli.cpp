// SPDX-License-Identifier: Apache-2.0

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sensreg/bcd.hpp"
#include "sensreg/config.hpp"
#include "sensreg/errors.hpp"
#include "sensreg/monte_carlo.hpp"
#include "sensreg/report.hpp"
#include "sensreg/scenario.hpp"
#include "sensreg/series_io.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitSolver = 2;

int cmd_simulate(const std::string& config_path, std::uint64_t seed, const std::string& out) {
  const auto cfg = sensreg::load_config(config_path);
  const auto& noise = cfg.noise_grid.front();
  const auto sim = sensreg::simulate(cfg.scenario_at(noise), noise.motion(), noise.measurement(), seed);
  sensreg::write_series_csv(out, sim.series);
  std::cout << "wrote " << sim.series.size() << " measurements to " << out << '\n';
  return 0;
}

int cmd_estimate(const std::string& config_path, const std::string& input, const std::string& solver,
                 const std::string& out) {
  const auto cfg = sensreg::load_config(config_path);
  const auto& noise = cfg.noise_grid.front();
  const auto scenario = cfg.scenario_at(noise);
  auto series = sensreg::read_series_csv(input, static_cast<int>(scenario.sensors.size()));
  const auto reg = sensreg::make_input(scenario, std::move(series), noise.measurement());

  auto bcd = cfg.bcd;
  bcd.azimuth_solver = solver == "gp" ? sensreg::AzimuthSolver::gp : sensreg::AzimuthSolver::sdr;
  const auto est = sensreg::run_bcd(reg, bcd);

  std::ofstream os(out);
  if (!os) throw sensreg::IoError("cannot open '" + out + "' for writing");
  os << sensreg::estimate_to_json(est) << '\n';
  if (!os) throw sensreg::IoError("failed writing '" + out + "'");
  std::cout << "estimate written to " << out << " after " << est.iterations << " iterations\n";
  return 0;
}

int cmd_montecarlo(const std::string& config_path, const std::string& out_dir) {
  auto cfg = sensreg::load_config(config_path);
  const std::string dir = out_dir.empty() ? cfg.output_dir : out_dir;
  if (dir.empty()) throw sensreg::ValidationError("no output directory given (--out-dir or output_dir)");
  const auto report = sensreg::run_monte_carlo(cfg);
  for (const auto format : {sensreg::ReportFormat::csv, sensreg::ReportFormat::svg}) {
    for (const auto& path : sensreg::emit_report(report, format, dir)) std::cout << path << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asynchronous multi-sensor range/azimuth bias registration"};
  app.require_subcommand(1);

  std::string config_path, out, input, out_dir, solver = "sdr";
  std::uint64_t seed = 0;

  auto* sim = app.add_subcommand("simulate", "Simulate a measurement series to CSV");
  sim->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  sim->add_option("--seed", seed, "random seed")->required();
  sim->add_option("--out", out, "output CSV path")->required();

  auto* est = app.add_subcommand("estimate", "Estimate sensor biases from a series CSV");
  est->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  est->add_option("--input", input, "measurement series CSV")->required()->check(CLI::ExistingFile);
  est->add_option("--solver", solver, "azimuth solver")->check(CLI::IsMember({"sdr", "gp"}));
  est->add_option("--out", out, "output JSON path")->required();

  auto* mc = app.add_subcommand("montecarlo", "Run the Monte Carlo sweep and write CSV/SVG reports");
  mc->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  mc->add_option("--out-dir", out_dir, "report directory (defaults to output_dir in the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (*sim) return cmd_simulate(config_path, seed, out);
    if (*est) return cmd_estimate(config_path, input, solver, out);
    return cmd_montecarlo(config_path, out_dir);
  } catch (const sensreg::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const sensreg::DegenerateGeometryError& e) {
    std::cerr << "degenerate geometry: " << e.what() << '\n';
    return kExitSolver;
  } catch (const sensreg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}
