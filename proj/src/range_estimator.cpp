// SPDX-License-Identifier: Apache-2.0

#include "sensreg/range_estimator.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "sensreg/errors.hpp"

namespace sensreg {

namespace {

struct LsqResult {
  Eigen::VectorXd x;
  double residual_norm_sq;
};

// Returns nullopt when the condition number is beyond kMaxConditionNumber.
std::optional<LsqResult> solve_lsq(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (condition_number(a) > kMaxConditionNumber) return std::nullopt;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  LsqResult out{qr.solve(b), 0.0};
  out.residual_norm_sq = (a * out.x - b).squaredNorm();
  return out;
}

}  // namespace

double condition_number(const Eigen::MatrixXd& a) {
  if (a.rows() < a.cols() || a.cols() == 0) return std::numeric_limits<double>::infinity();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

Eigen::MatrixXd SingleSensorSystem::design() const {
  Eigen::MatrixXd a(h0.size(), 3);
  a.col(0) = h0;
  a.rightCols(2) = h1;
  return a;
}

SingleSensorSystem assemble_single(const MeasurementSeries& single, double delta_phi, DebiasFactor lam) {
  const std::size_t K = single.size();
  if (K < 3) {
    throw ValidationError("single-sensor range estimate needs at least 3 measurements, got " + std::to_string(K));
  }
  for (const auto& m : single.measurements) {
    if (m.sensor != single.measurements.front().sensor) {
      throw ValidationError("single-sensor system built from a mixed-sensor series");
    }
  }

  const double il = lam.inverse();
  const auto rows = static_cast<Eigen::Index>(2 * (K - 1));
  SingleSensorSystem sys{Eigen::VectorXd(rows), Eigen::MatrixXd::Zero(rows, 2), Eigen::VectorXd(rows)};
  for (std::size_t k = 0; k + 1 < K; ++k) {
    const auto& a = single[k];
    const auto& b = single[k + 1];
    const double ca = std::cos(a.z.azimuth + delta_phi), sa = std::sin(a.z.azimuth + delta_phi);
    const double cb = std::cos(b.z.azimuth + delta_phi), sb = std::sin(b.z.azimuth + delta_phi);
    const auto r = static_cast<Eigen::Index>(2 * k);
    sys.h0(r) = il * (cb - ca);
    sys.h0(r + 1) = il * (sb - sa);
    sys.h1(r, 0) = -single.gap(k);
    sys.h1(r + 1, 1) = -single.gap(k);
    sys.y(r) = -il * (b.z.range * cb - a.z.range * ca);
    sys.y(r + 1) = -il * (b.z.range * sb - a.z.range * sa);
  }
  return sys;
}

RangeSolution solve_single(const SingleSensorSystem& system) {
  const auto sol = solve_lsq(system.design(), system.y);
  if (!sol) {
    throw DegenerateGeometryError(
        "single-sensor range system is rank deficient (target track collinear with the sensor?)");
  }
  RangeSolution out;
  out.delta_rho = sol->x.head(1);
  out.velocity = Velocity(sol->x(1), sol->x(2));
  out.residual_norm_sq = sol->residual_norm_sq;
  return out;
}

MultiRangeSystem assemble_multi_range(const RegistrationInput& input, std::span<const double> delta_phi,
                                      const Velocity& v) {
  const auto& series = input.series;
  const int M = input.sensor_count();
  if (static_cast<int>(delta_phi.size()) != M) throw ValidationError("azimuth bias vector has wrong length");
  const std::size_t K = series.size();
  if (K < 2) throw ValidationError("multi-sensor range system needs at least 2 measurements");

  const double il = input.lambda.inverse();
  const auto rows = static_cast<Eigen::Index>(2 * (K - 1));
  MultiRangeSystem sys{Eigen::MatrixXd::Zero(rows, M), Eigen::VectorXd(rows)};
  for (std::size_t k = 0; k + 1 < K; ++k) {
    const auto& a = series[k];
    const auto& b = series[k + 1];
    const double pa = a.z.azimuth + delta_phi[static_cast<std::size_t>(a.sensor)];
    const double pb = b.z.azimuth + delta_phi[static_cast<std::size_t>(b.sensor)];
    const double ca = std::cos(pa), sa = std::sin(pa), cb = std::cos(pb), sb = std::sin(pb);
    const auto r = static_cast<Eigen::Index>(2 * k);
    // Same-sensor rows accumulate into one column.
    sys.g(r, b.sensor) += il * cb;
    sys.g(r, a.sensor) -= il * ca;
    sys.g(r + 1, b.sensor) += il * sb;
    sys.g(r + 1, a.sensor) -= il * sa;

    const auto& p_a = input.sensor_positions[static_cast<std::size_t>(a.sensor)];
    const auto& p_b = input.sensor_positions[static_cast<std::size_t>(b.sensor)];
    const double T = series.gap(k);
    const double yc = il * (b.z.range * cb - a.z.range * ca);
    const double ys = il * (b.z.range * sb - a.z.range * sa);
    sys.y(r) = -(yc + (p_b.x - p_a.x) - T * v.x());
    sys.y(r + 1) = -(ys + (p_b.y - p_a.y) - T * v.y());
  }
  return sys;
}

RangeSolution solve_multi_range(const RegistrationInput& input, std::span<const double> delta_phi,
                                const Velocity& v) {
  const auto sys = assemble_multi_range(input, delta_phi, v);
  const auto sol = solve_lsq(sys.g, sys.y);
  if (!sol) {
    std::ostringstream msg;
    msg << "multi-sensor range system is rank deficient; under-observed sensors:";
    const auto counts = input.series.counts_per_sensor();
    bool any = false;
    for (int m = 0; m < input.sensor_count(); ++m) {
      if (counts[static_cast<std::size_t>(m)] < 3 || sys.g.col(m).squaredNorm() == 0.0) {
        msg << ' ' << (m + 1) << " (" << counts[static_cast<std::size_t>(m)] << " measurements)";
        any = true;
      }
    }
    if (!any) msg << " none individually; geometry is collinear";
    throw DegenerateGeometryError(msg.str());
  }
  return {sol->x, std::nullopt, sol->residual_norm_sq};
}

}  // namespace sensreg
