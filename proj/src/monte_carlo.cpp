// SPDX-License-Identifier: Apache-2.0

#include "sensreg/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "sensreg/errors.hpp"

namespace sensreg {

namespace {

struct Job {
  std::size_t noise_index;
  int run;
};

std::vector<RunRecord> execute_job(const ExperimentConfig& cfg, const Job& job) {
  const NoisePoint& noise = cfg.noise_grid[job.noise_index];
  const Scenario scenario = cfg.scenario_at(noise);
  const auto seed = cfg.base_seed + static_cast<std::uint64_t>(job.run);

  std::vector<RunRecord> out;
  RegistrationInput input;
  std::string sim_error;
  try {
    input = make_input(scenario, simulate(scenario, noise.motion(), noise.measurement(), seed).series,
                       noise.measurement());
  } catch (const Error& e) {
    sim_error = std::string("simulation: ") + e.what();
  }

  for (const Estimator est : cfg.estimators) {
    RunRecord rec;
    rec.noise_index = job.noise_index;
    rec.run = job.run;
    rec.estimator = est;
    if (!sim_error.empty()) {
      rec.error = sim_error;
      out.push_back(std::move(rec));
      continue;
    }
    BcdConfig bcd = cfg.bcd;
    bcd.azimuth_solver = est == Estimator::bcd_gp ? AzimuthSolver::gp : AzimuthSolver::sdr;
    const auto start = std::chrono::steady_clock::now();
    try {
      const BiasEstimate e = est == Estimator::two_stage ? two_stage(input, bcd) : run_bcd(input, bcd);
      rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      const auto M = static_cast<Eigen::Index>(scenario.sensors.size());
      rec.range_error_m.resize(M);
      rec.azimuth_error_rad.resize(M);
      for (Eigen::Index m = 0; m < M; ++m) {
        const auto& s = scenario.sensors[static_cast<std::size_t>(m)];
        rec.range_error_m(m) = e.delta_rho(m) - s.true_range_bias_m;
        rec.azimuth_error_rad(m) = angle_diff(e.delta_phi(m), s.true_azimuth_bias_rad);
      }
      rec.iterations = e.iterations;
      rec.flagged = e.flagged;
      rec.all_rank_one = est != Estimator::bcd_gp && std::all_of(e.steps.begin(), e.steps.end(), [](const auto& s) {
                           return s.tightness == Tightness::rank_one;
                         });
      rec.ok = rec.range_error_m.allFinite() && rec.azimuth_error_rad.allFinite();
      if (!rec.ok) rec.error = "non-finite estimate";
    } catch (const Error& ex) {
      rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      rec.error = ex.what();
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace

const char* to_string(BiasKind k) { return k == BiasKind::range ? "range_m" : "azimuth_deg"; }

double rmse(const std::vector<double>& errors) {
  if (errors.empty()) return 0.0;
  double acc = 0.0;
  for (double e : errors) acc += e * e;
  return std::sqrt(acc / static_cast<double>(errors.size()));
}

const RmseRow& MonteCarloReport::find(Estimator e, std::size_t noise_index, int sensor_id, BiasKind kind) const {
  for (const auto& r : rmse) {
    if (r.estimator == e && r.noise_index == noise_index && r.sensor_id == sensor_id && r.kind == kind) return r;
  }
  throw std::out_of_range("no RMSE row for the requested combination");
}

MonteCarloReport run_monte_carlo(const ExperimentConfig& cfg) {
  if (cfg.noise_grid.empty()) throw ValidationError("noise grid is empty");
  if (cfg.num_runs < 1) throw ValidationError("num_runs must be >= 1");
  if (cfg.estimators.empty()) throw ValidationError("no estimators selected");

  std::vector<Job> jobs;
  for (std::size_t n = 0; n < cfg.noise_grid.size(); ++n)
    for (int r = 0; r < cfg.num_runs; ++r) jobs.push_back({n, r});

  std::vector<std::vector<RunRecord>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) results[i] = execute_job(cfg, jobs[i]);
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const auto nthreads =
      std::min<std::size_t>(jobs.size(), cfg.threads > 0 ? static_cast<std::size_t>(cfg.threads) : hw);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }

  MonteCarloReport report;
  report.sensor_count = static_cast<int>(cfg.scenario.sensors.size());
  report.noise_grid = cfg.noise_grid;
  report.estimators = cfg.estimators;
  for (auto& batch : results)
    for (auto& rec : batch) report.runs.push_back(std::move(rec));

  for (const Estimator est : cfg.estimators) {
    for (std::size_t n = 0; n < cfg.noise_grid.size(); ++n) {
      std::vector<const RunRecord*> used;
      int excluded = 0;
      double seconds = 0.0;
      for (const auto& rec : report.runs) {
        if (rec.estimator != est || rec.noise_index != n) continue;
        if (rec.ok) {
          used.push_back(&rec);
          seconds += rec.seconds;
        } else {
          ++excluded;
        }
      }
      report.timing.push_back({est, n, used.empty() ? 0.0 : seconds / static_cast<double>(used.size())});
      for (int m = 0; m < report.sensor_count; ++m) {
        for (const BiasKind kind : {BiasKind::range, BiasKind::azimuth}) {
          std::vector<double> errs;
          errs.reserve(used.size());
          for (const auto* rec : used) {
            errs.push_back(kind == BiasKind::range ? rec->range_error_m(m) : rad_to_deg(rec->azimuth_error_rad(m)));
          }
          report.rmse.push_back(
              {est, n, cfg.noise_grid[n], m + 1, kind, rmse(errs), static_cast<int>(used.size()), excluded});
        }
      }
    }
  }
  return report;
}

}  // namespace sensreg
