// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "sensreg/scenario.hpp"
#include "sensreg/sdp_solver.hpp"

namespace sensreg {

/// Azimuth/velocity block at fixed range biases, as the complex program
///   min |H x - t v + c|^2  s.t. |x_m| = 1,
/// where x_m = exp(j dphi_m) and v = vx + j vy. The projector P = I - t t'/|t|^2 that
/// eliminates v is applied through t and never stored.
struct QcqpData {
  CMatrix h;           // (K-1) x M
  Eigen::VectorXd t;   // K-1 time gaps
  CVector c;           // K-1 sensor-position differences

  int sensor_count() const { return static_cast<int>(h.cols()); }

  /// P z.
  CVector project(const CVector& z) const;
  /// P H, materialised column by column ((K-1) x M).
  CMatrix projected_h() const;
};

/// Needs K >= M + 2 so that P H can have full column rank.
QcqpData build_qcqp(const RegistrationInput& input, std::span<const double> delta_rho);

/// Checked constructor for hand-built instances.
QcqpData make_qcqp(CMatrix h, Eigen::VectorXd t, CVector c);

/// |P (H xt + c)|^2 for an M-vector xt (the reduced objective with v eliminated).
double reduced_objective(const QcqpData& q, const CVector& xt);

/// C = [[H'PH, H'Pc], [c'PH, 0]] of size (M+1). For unit-modulus x with xt = x(0:M) / x(M),
/// x'Cx + |Pc|^2 = |P H xt + P c|^2.
struct HomogeneousCost {
  CMatrix c;
  double pc_norm_sq = 0.0;  // |P c|^2

  Eigen::Index size() const { return c.rows(); }
};

HomogeneousCost homogenize(const QcqpData& q);

/// Re(x' C x).
double quadratic_form(const CMatrix& c, const CVector& x);

enum class Tightness { rank_one, rounded };

const char* to_string(Tightness t);

struct AzimuthSolution {
  Eigen::VectorXd delta_phi;  // per sensor, radians in (-pi, pi]
  Velocity velocity = Velocity::Zero();
  CVector x;                  // M+1 unit-modulus entries
  double lifted_objective = 0.0;  // x'Cx
  double objective = 0.0;         // x'Cx + |Pc|^2 = reduced objective, >= 0 up to rounding
  Tightness tightness = Tightness::rank_one;
  bool converged = true;
  int iterations = 0;
};

/// Complex least-squares velocity (t't)^-1 t'(H xt + c), xt = x(0:M) / x(M).
Velocity recover_velocity(const CVector& x, const QcqpData& q);

struct GpOptions {
  double armijo_factor = 0.5;
  double sufficient_decrease = 1e-4;
  double tol = 1e-10;  // projected-gradient norm relative to |lambda|_max(C) sqrt(n)
  int max_iter = 5000;
};

/// Gradient projection on the torus |x_m| = 1 with Armijo backtracking. The first trial
/// step is 1/|lambda|_max(C) from power iteration; later trials start from twice the last
/// accepted step. `trace`, when given, receives x'Cx after every accepted step.
AzimuthSolution solve_gp(const HomogeneousCost& cost, const QcqpData& q, const CVector& x0,
                         const GpOptions& opts = {}, std::vector<double>* trace = nullptr);

struct SdrOptions {
  SdpOptions sdp;
  double rank_ratio = 1e-6;
  GpOptions gp;  // used for the rounding fallback
};

struct SdrResult {
  AzimuthSolution azimuth;
  DiagSdpSolution sdp;
  double eig_ratio = 1.0;
};

/// Solves the unit-diagonal relaxation. A rank-one X is factored and read off directly;
/// otherwise the leading eigenvector is rounded to unit modulus and refined by solve_gp.
/// Throws SolverError when the SDP does not converge.
SdrResult solve_sdr(const HomogeneousCost& cost, const QcqpData& q, const SdrOptions& opts = {});

/// Global-phase-free readout dphi_m = angle(x_m / x_M).
Eigen::VectorXd extract_angles(const CVector& x);

/// Optimality and uniqueness conditions for a rank-one SDP solution:
///  1. diag(X) = 1, X >= 0
///  2. C + Diag(y) >= 0
///  3. [C + Diag(y)] X = 0
///  4. H'PH + Diag(y(0:M)) > 0
/// Matrix slacks are divided by `scale` = max(1, max |C_ij|) before comparing to tol.
struct CertificateReport {
  bool primal_feasible = false;
  bool dual_feasible = false;
  bool complementary = false;
  bool strictly_positive = false;

  double diag_violation = 0.0;       // max |X_ii - 1|
  double primal_min_eig = 0.0;       // lambda_min(X)
  double dual_min_eig = 0.0;         // lambda_min(C + Diag(y))
  double complementarity_norm = 0.0; // |[C + Diag(y)] X|_F
  double block_min_eig = 0.0;        // lambda_min(H'PH + Diag(y(0:M)))
  double scale = 1.0;

  bool kkt() const { return primal_feasible && dual_feasible && complementary; }
  bool all() const { return kkt() && strictly_positive; }
};

CertificateReport check_certificate(const CMatrix& x, const Eigen::VectorXd& y, const HomogeneousCost& cost,
                                    const QcqpData& q, double tol);

/// Explicit primal/dual pair x* = [-(H'PH)^-1 H'Pc; 1], y* = [0; c'PH (H'PH)^-1 H'Pc].
/// Certifies the noiseless instance. Throws DegenerateGeometryError if H'PH is singular.
struct ConstructedCertificate {
  CVector x;
  CMatrix big_x;
  Eigen::VectorXd y;
};

ConstructedCertificate construct_certificate(const QcqpData& q);

}  // namespace sensreg
