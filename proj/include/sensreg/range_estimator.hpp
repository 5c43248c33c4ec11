// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>

#include <Eigen/Core>

#include "sensreg/scenario.hpp"

namespace sensreg {

/// Systems whose condition number exceeds this are reported as degenerate geometry.
inline constexpr double kMaxConditionNumber = 1e12;

/// Single-sensor range/velocity least squares at a fixed trial azimuth bias:
/// minimize |h0 * drho + h1 * v - y|^2.
struct SingleSensorSystem {
  Eigen::VectorXd h0;  // 2(K-1): c_1, s_1, c_2, s_2, ...
  Eigen::MatrixXd h1;  // 2(K-1) x 2: -T_k (x) I_2
  Eigen::VectorXd y;   // 2(K-1): y^c_1, y^s_1, ...

  /// [h0, h1], the 2(K-1) x 3 design matrix.
  Eigen::MatrixXd design() const;
};

struct RangeSolution {
  Eigen::VectorXd delta_rho;        // one entry per sensor (meters)
  std::optional<Velocity> velocity;  // single-sensor solve only
  double residual_norm_sq = 0.0;
};

/// Needs K >= 3 measurements, all from one sensor. Throws ValidationError otherwise.
SingleSensorSystem assemble_single(const MeasurementSeries& single, double delta_phi, DebiasFactor lam);

/// QR solve of the stacked system. Throws DegenerateGeometryError when rank([h0, h1]) < 3.
RangeSolution solve_single(const SingleSensorSystem& system);

/// Multi-sensor range block at fixed azimuth biases and velocity: minimize |G drho - y|^2.
struct MultiRangeSystem {
  Eigen::MatrixXd g;  // 2(K-1) x M, at most two non-zeros per row
  Eigen::VectorXd y;  // 2(K-1)
};

MultiRangeSystem assemble_multi_range(const RegistrationInput& input, std::span<const double> delta_phi,
                                      const Velocity& v);

/// Throws DegenerateGeometryError naming under-observed sensors when G is rank deficient.
RangeSolution solve_multi_range(const RegistrationInput& input, std::span<const double> delta_phi, const Velocity& v);

/// Condition number of a tall matrix from its singular values (infinity when rank deficient).
double condition_number(const Eigen::MatrixXd& a);

}  // namespace sensreg
