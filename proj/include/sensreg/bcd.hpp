// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "sensreg/azimuth_estimator.hpp"
#include "sensreg/kernels.hpp"
#include "sensreg/scenario.hpp"

namespace sensreg {

enum class AzimuthSolver { sdr, gp, sdr_then_gp };

const char* to_string(AzimuthSolver s);
/// Accepts "sdr", "gp", "sdr-then-gp". Throws ValidationError otherwise.
AzimuthSolver parse_azimuth_solver(const std::string& name);

struct BcdConfig {
  int max_iters = 50;
  double rel_obj_tol = 1e-10;
  AzimuthSolver azimuth_solver = AzimuthSolver::sdr;
  SdrOptions sdr;
  /// Evaluate the rank-one certificate after every SDR step (stored in AzimuthStep).
  bool certify = false;
  double certificate_tol = 1e-6;
};

struct AzimuthStep {
  int iteration = 0;
  Tightness tightness = Tightness::rank_one;
  double eig_ratio = 0.0;  // 0 for pure GP steps
  bool accepted = true;
  std::optional<CertificateReport> certificate;
};

struct BiasEstimate {
  Eigen::VectorXd delta_rho;  // meters
  Eigen::VectorXd delta_phi;  // radians
  Velocity velocity = Velocity::Zero();
  std::vector<double> objective_trace;  // after each outer iteration
  int iterations = 0;
  bool converged = false;
  /// Set when a rounded azimuth update was rejected for raising the objective.
  bool flagged = false;
  std::vector<AzimuthStep> steps;

  /// True when no trace entry exceeds its predecessor by more than `slack`.
  bool trace_nonincreasing(double slack = 1e-9) const;
};

/// sum_k |g_{k+1} - g_k - T_k v|^2 with g_k = debiased(z_k + theta_{s_k}) + p_{s_k}.
double objective(const RegistrationInput& input, std::span<const double> delta_rho, std::span<const double> delta_phi,
                 const Velocity& v);
double objective(const RegistrationInput& input, std::span<const double> delta_rho, std::span<const double> delta_phi,
                 const Velocity& v, const kernels::KernelTable& table);

/// Alternating minimisation: per-sensor range initialisation at a zero trial azimuth, then
/// (azimuth, velocity) and multi-sensor range updates until the relative objective decrease
/// falls below rel_obj_tol. Errors carry the iteration index in their message.
BiasEstimate run_bcd(const RegistrationInput& input, const BcdConfig& cfg = {});

/// One pass only: per-sensor range initialisation and a single azimuth solve.
BiasEstimate two_stage(const RegistrationInput& input, const BcdConfig& cfg = {});

}  // namespace sensreg
