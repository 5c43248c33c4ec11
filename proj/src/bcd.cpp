// SPDX-License-Identifier: Apache-2.0

#include "sensreg/bcd.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sensreg/errors.hpp"
#include "sensreg/range_estimator.hpp"

namespace sensreg {

namespace {

// Stop once the objective is this small relative to the squared debiased ranges.
constexpr double kObjectiveFloor = 1e-24;

template <typename F>
auto at_iteration(int t, F&& f) -> decltype(f()) {
  const std::string where = "BCD iteration " + std::to_string(t) + ": ";
  try {
    return f();
  } catch (const DegenerateGeometryError& e) {
    throw DegenerateGeometryError(where + e.what());
  } catch (const SolverError& e) {
    throw SolverError(where + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(where + e.what());
  }
}

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

CVector unit_vector_from_angles(const Eigen::VectorXd& dphi) {
  CVector x(dphi.size() + 1);
  for (Eigen::Index m = 0; m < dphi.size(); ++m) x(m) = std::polar(1.0, dphi(m));
  x(dphi.size()) = 1.0;
  return x;
}

struct AzimuthUpdate {
  Eigen::VectorXd delta_phi;
  Velocity velocity;
  AzimuthStep step;
};

AzimuthUpdate azimuth_update(const RegistrationInput& input, const Eigen::VectorXd& delta_rho,
                             const Eigen::VectorXd& prev_phi, const BcdConfig& cfg, int t) {
  const QcqpData q = build_qcqp(input, as_span(delta_rho));
  const HomogeneousCost cost = homogenize(q);
  AzimuthUpdate up;
  up.step.iteration = t;

  if (cfg.azimuth_solver == AzimuthSolver::gp) {
    const auto sol = solve_gp(cost, q, unit_vector_from_angles(prev_phi), cfg.sdr.gp);
    up.delta_phi = sol.delta_phi;
    up.velocity = sol.velocity;
    up.step.tightness = Tightness::rounded;
    return up;
  }

  const SdrResult r = solve_sdr(cost, q, cfg.sdr);
  AzimuthSolution sol = r.azimuth;
  if (cfg.azimuth_solver == AzimuthSolver::sdr_then_gp) {
    const Tightness tight = sol.tightness;
    sol = solve_gp(cost, q, sol.x, cfg.sdr.gp);
    sol.tightness = tight;
  }
  up.delta_phi = sol.delta_phi;
  up.velocity = sol.velocity;
  up.step.tightness = sol.tightness;
  up.step.eig_ratio = r.eig_ratio;
  if (cfg.certify) up.step.certificate = check_certificate(r.sdp.x, r.sdp.y, cost, q, cfg.certificate_tol);
  return up;
}

double data_scale(const RegistrationInput& input) {
  double s = 0.0;
  for (const auto& m : input.series.measurements) s += m.z.range * m.z.range;
  return s * input.lambda.inverse() * input.lambda.inverse();
}

BiasEstimate run_impl(const RegistrationInput& input, const BcdConfig& cfg, int max_iters) {
  const int M = input.sensor_count();
  if (M < 1 || input.series.sensor_count != M) throw ValidationError("series and sensor layout disagree on M");
  if (max_iters < 1) throw ValidationError("max_iters must be positive");
  if (!(cfg.rel_obj_tol > 0.0)) throw ValidationError("rel_obj_tol must be positive");
  const auto counts = input.series.counts_per_sensor();
  for (int m = 0; m < M; ++m) {
    if (counts[static_cast<std::size_t>(m)] < 3) {
      throw ValidationError("sensor " + std::to_string(m + 1) + " has " +
                            std::to_string(counts[static_cast<std::size_t>(m)]) + " measurements; need at least 3");
    }
  }

  // t = 0: the single-sensor optimum does not depend on the trial azimuth, so zero is used.
  Eigen::VectorXd delta_rho(M);
  at_iteration(0, [&] {
    for (int m = 0; m < M; ++m) {
      const auto sys = assemble_single(input.series.for_sensor(m), 0.0, input.lambda);
      delta_rho(m) = solve_single(sys).delta_rho(0);
    }
    return 0;
  });

  BiasEstimate est;
  Eigen::VectorXd delta_phi = Eigen::VectorXd::Zero(M);
  Velocity velocity = Velocity::Zero();
  bool have_azimuth = false;
  double best = std::numeric_limits<double>::infinity();
  const double floor = kObjectiveFloor * data_scale(input);

  for (int t = 0; t < max_iters; ++t) {
    if (t > 0) {
      const auto sol = at_iteration(t, [&] { return solve_multi_range(input, as_span(delta_phi), velocity); });
      delta_rho = sol.delta_rho;
    }

    auto up = at_iteration(t, [&] { return azimuth_update(input, delta_rho, delta_phi, cfg, t); });
    double f = objective(input, as_span(delta_rho), as_span(up.delta_phi), up.velocity);
    if (have_azimuth && up.step.tightness == Tightness::rounded && cfg.azimuth_solver != AzimuthSolver::gp) {
      const double keep = objective(input, as_span(delta_rho), as_span(delta_phi), velocity);
      if (f > keep) {
        up.step.accepted = false;
        est.flagged = true;
        f = keep;
      }
    }
    if (up.step.accepted) {
      delta_phi = up.delta_phi;
      velocity = up.velocity;
    }
    have_azimuth = true;
    est.steps.push_back(up.step);
    est.objective_trace.push_back(f);
    est.iterations = t + 1;

    if (f <= best) {
      best = f;
      est.delta_rho = delta_rho;
      est.delta_phi = delta_phi;
      est.velocity = velocity;
    }

    if (f <= floor) {
      est.converged = true;
      break;
    }
    if (t > 0) {
      const double prev = est.objective_trace[est.objective_trace.size() - 2];
      if (prev - f <= cfg.rel_obj_tol * prev) {
        est.converged = true;
        break;
      }
    }
  }
  return est;
}

}  // namespace

const char* to_string(AzimuthSolver s) {
  switch (s) {
    case AzimuthSolver::sdr:
      return "sdr";
    case AzimuthSolver::gp:
      return "gp";
    case AzimuthSolver::sdr_then_gp:
      return "sdr-then-gp";
  }
  return "unknown";
}

AzimuthSolver parse_azimuth_solver(const std::string& name) {
  if (name == "sdr") return AzimuthSolver::sdr;
  if (name == "gp") return AzimuthSolver::gp;
  if (name == "sdr-then-gp") return AzimuthSolver::sdr_then_gp;
  throw ValidationError("unknown azimuth solver '" + name + "' (expected sdr, gp or sdr-then-gp)");
}

bool BiasEstimate::trace_nonincreasing(double slack) const {
  for (std::size_t i = 1; i < objective_trace.size(); ++i) {
    if (objective_trace[i] > objective_trace[i - 1] + slack) return false;
  }
  return true;
}

double objective(const RegistrationInput& input, std::span<const double> delta_rho, std::span<const double> delta_phi,
                 const Velocity& v) {
  return objective(input, delta_rho, delta_phi, v, kernels::active());
}

double objective(const RegistrationInput& input, std::span<const double> delta_rho, std::span<const double> delta_phi,
                 const Velocity& v, const kernels::KernelTable& table) {
  const auto& series = input.series;
  const std::size_t K = series.size();
  const std::size_t M = static_cast<std::size_t>(input.sensor_count());
  if (delta_rho.size() != M || delta_phi.size() != M) throw ValidationError("bias vectors have wrong length");

  std::vector<double> cos_b(M), sin_b(M);
  for (std::size_t m = 0; m < M; ++m) {
    cos_b[m] = std::cos(delta_phi[m]);
    sin_b[m] = std::sin(delta_phi[m]);
  }
  // Columns: range, cos_az, sin_az, range_bias, cos_bias, sin_bias, sensor_x, sensor_y, t, gx, gy.
  std::vector<double> buf(11 * K);
  auto col = [&](std::size_t i) { return std::span<double>(buf.data() + i * K, K); };
  for (std::size_t k = 0; k < K; ++k) {
    const auto& meas = series[k];
    const auto s = static_cast<std::size_t>(meas.sensor);
    col(0)[k] = meas.z.range;
    col(1)[k] = std::cos(meas.z.azimuth);
    col(2)[k] = std::sin(meas.z.azimuth);
    col(3)[k] = delta_rho[s];
    col(4)[k] = cos_b[s];
    col(5)[k] = sin_b[s];
    col(6)[k] = input.sensor_positions[s].x;
    col(7)[k] = input.sensor_positions[s].y;
    col(8)[k] = meas.t;
  }
  const kernels::CompensationBatch batch{col(0), col(1), col(2), col(3), col(4), col(5),
                                         col(6), col(7), input.lambda.inverse()};
  table.compensate(batch, col(9), col(10));
  return table.increment_residual_sq(col(9), col(10), col(8), v.x(), v.y());
}

BiasEstimate run_bcd(const RegistrationInput& input, const BcdConfig& cfg) {
  return run_impl(input, cfg, cfg.max_iters);
}

BiasEstimate two_stage(const RegistrationInput& input, const BcdConfig& cfg) { return run_impl(input, cfg, 1); }

}  // namespace sensreg
