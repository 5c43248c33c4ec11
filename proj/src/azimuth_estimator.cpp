// SPDX-License-Identifier: Apache-2.0

#include "sensreg/azimuth_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "sensreg/errors.hpp"

namespace sensreg {

namespace {

using cd = std::complex<double>;

// |lambda|_max of a Hermitian matrix by power iteration.
double spectral_radius_estimate(const CMatrix& c) {
  const Eigen::Index n = c.rows();
  CVector v = CVector::Ones(n) / std::sqrt(static_cast<double>(n));
  // Break symmetry in case the all-ones vector sits in a null space.
  for (Eigen::Index i = 0; i < n; ++i) v(i) *= std::polar(1.0, 0.37 * static_cast<double>(i));
  double lambda = 0.0;
  for (int it = 0; it < 100; ++it) {
    CVector w = c * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    const double next = norm;
    v = w / norm;
    if (it > 5 && std::abs(next - lambda) <= 1e-6 * next) return next;
    lambda = next;
  }
  return lambda;
}

// Riemannian gradient of x'Cx on the torus: the Euclidean gradient 2Cx minus its radial part.
CVector tangent_gradient(const CVector& grad, const CVector& x) {
  CVector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = grad(i) - (std::conj(x(i)) * grad(i)).real() * x(i);
  return out;
}

// f(a) - f(b) for f(x) = x'Cx, evaluated without cancellation.
double form_difference(const CMatrix& c, const CVector& a, const CVector& b) {
  return (a - b).dot(c * (a + b)).real();
}

}  // namespace

const char* to_string(Tightness t) { return t == Tightness::rank_one ? "rank_one" : "rounded"; }

CVector QcqpData::project(const CVector& z) const {
  const double tt = t.squaredNorm();
  const cd tz = t.cast<cd>().dot(z);  // t is real so dot() conjugation is harmless
  return z - t.cast<cd>() * (tz / tt);
}

CMatrix QcqpData::projected_h() const {
  CMatrix out(h.rows(), h.cols());
  for (Eigen::Index m = 0; m < h.cols(); ++m) out.col(m) = project(h.col(m));
  return out;
}

QcqpData make_qcqp(CMatrix h, Eigen::VectorXd t, CVector c) {
  if (h.rows() != t.size() || h.rows() != c.size()) throw ValidationError("QCQP data dimensions disagree");
  if (!(t.squaredNorm() > 0.0)) throw ValidationError("QCQP time-gap vector must be non-zero");
  return {std::move(h), std::move(t), std::move(c)};
}

QcqpData build_qcqp(const RegistrationInput& input, std::span<const double> delta_rho) {
  const auto& series = input.series;
  const int M = input.sensor_count();
  const std::size_t K = series.size();
  if (static_cast<int>(delta_rho.size()) != M) throw ValidationError("range bias vector has wrong length");
  if (K < static_cast<std::size_t>(M) + 2) {
    throw ValidationError("azimuth block needs K >= M + 2 measurements (K=" + std::to_string(K) +
                          ", M=" + std::to_string(M) + ")");
  }
  const double il = input.lambda.inverse();
  const auto rows = static_cast<Eigen::Index>(K - 1);
  QcqpData q{CMatrix::Zero(rows, M), Eigen::VectorXd(rows), CVector(rows)};
  for (std::size_t k = 0; k + 1 < K; ++k) {
    const auto& a = series[k];
    const auto& b = series[k + 1];
    const auto r = static_cast<Eigen::Index>(k);
    q.h(r, b.sensor) += il * (b.z.range + delta_rho[static_cast<std::size_t>(b.sensor)]) * std::polar(1.0, b.z.azimuth);
    q.h(r, a.sensor) -= il * (a.z.range + delta_rho[static_cast<std::size_t>(a.sensor)]) * std::polar(1.0, a.z.azimuth);
    q.t(r) = series.gap(k);
    const auto& pa = input.sensor_positions[static_cast<std::size_t>(a.sensor)];
    const auto& pb = input.sensor_positions[static_cast<std::size_t>(b.sensor)];
    q.c(r) = cd(pb.x - pa.x, pb.y - pa.y);
  }
  return q;
}

double reduced_objective(const QcqpData& q, const CVector& xt) { return q.project(q.h * xt + q.c).squaredNorm(); }

HomogeneousCost homogenize(const QcqpData& q) {
  const Eigen::Index M = q.h.cols();
  const CMatrix ph = q.projected_h();
  const CVector pc = q.project(q.c);
  HomogeneousCost cost;
  cost.c = CMatrix::Zero(M + 1, M + 1);
  cost.c.topLeftCorner(M, M) = ph.adjoint() * ph;
  const CVector b = ph.adjoint() * pc;
  cost.c.topRightCorner(M, 1) = b;
  cost.c.bottomLeftCorner(1, M) = b.adjoint();
  cost.c = 0.5 * (cost.c + cost.c.adjoint()).eval();
  cost.pc_norm_sq = pc.squaredNorm();
  return cost;
}

double quadratic_form(const CMatrix& c, const CVector& x) { return x.dot(c * x).real(); }

Eigen::VectorXd extract_angles(const CVector& x) {
  const Eigen::Index M = x.size() - 1;
  Eigen::VectorXd out(M);
  for (Eigen::Index m = 0; m < M; ++m) out(m) = wrap_angle(std::arg(x(m) / x(M)));
  return out;
}

Velocity recover_velocity(const CVector& x, const QcqpData& q) {
  const Eigen::Index M = q.h.cols();
  const double tt = q.t.squaredNorm();
  if (!(tt > 0.0)) throw ValidationError("velocity recovery needs a non-zero time-gap vector");
  const CVector xt = x.head(M) / x(M);
  const cd v = q.t.cast<cd>().dot(q.h * xt + q.c) / tt;
  return {v.real(), v.imag()};
}

namespace {

AzimuthSolution finalize(const HomogeneousCost& cost, const QcqpData& q, CVector x, Tightness tightness) {
  AzimuthSolution sol;
  sol.x = std::move(x);
  sol.delta_phi = extract_angles(sol.x);
  sol.velocity = recover_velocity(sol.x, q);
  sol.lifted_objective = quadratic_form(cost.c, sol.x);
  sol.objective = reduced_objective(q, sol.x.head(q.sensor_count()) / sol.x(q.sensor_count()));
  sol.tightness = tightness;
  return sol;
}

}  // namespace

AzimuthSolution solve_gp(const HomogeneousCost& cost, const QcqpData& q, const CVector& x0, const GpOptions& opts,
                         std::vector<double>* trace) {
  const CMatrix& c = cost.c;
  const Eigen::Index n = c.rows();
  if (x0.size() != n) throw ValidationError("GP start vector has wrong length");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(std::abs(x0(i)) - 1.0) > 1e-9) throw ValidationError("GP start vector must have unit-modulus entries");
  }

  const double radius = spectral_radius_estimate(c);
  const double lip = radius > 0.0 ? radius : 1.0;
  const double gtol = opts.tol * lip * std::sqrt(static_cast<double>(n));
  const double min_step = 1e-12 / lip;

  CVector x = to_unit_modulus(x0);
  double f = quadratic_form(c, x);
  double step = 1.0 / lip;
  bool converged = false;
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    const CVector grad = 2.0 * (c * x);
    const CVector tgrad = tangent_gradient(grad, x);
    if (tgrad.norm() <= gtol) {
      converged = true;
      break;
    }
    // On the torus x'Cx and x'(C + Diag(s))x differ by the constant sum(s). Shifting by the current
    // multipliers removes the normal part of Cx, whose rounding would otherwise swamp small decreases.
    CMatrix shifted = c;
    for (Eigen::Index i = 0; i < n; ++i) shifted(i, i) -= 0.5 * (std::conj(x(i)) * grad(i)).real();
    double alpha = std::min(2.0 * step, 1e6 / lip);
    bool accepted = false;
    while (alpha >= min_step) {
      const CVector cand = to_unit_modulus(x - alpha * grad);
      if (cand == x) break;
      const double decrease = form_difference(shifted, cand, x);  // f(cand) - f(x)
      const double model = (tgrad.dot(cand - x)).real();         // first-order change, <= 0
      if (decrease <= opts.sufficient_decrease * model && decrease < 0.0) {
        x = cand;
        f += decrease;
        step = alpha;
        accepted = true;
        break;
      }
      alpha *= opts.armijo_factor;
    }
    if (!accepted) {
      // No representable decrease left along the projected arc: stationary to working precision.
      converged = true;
      break;
    }
    if (trace != nullptr) trace->push_back(f);
  }

  auto sol = finalize(cost, q, x, Tightness::rounded);
  sol.converged = converged;
  sol.iterations = iter;
  return sol;
}

SdrResult solve_sdr(const HomogeneousCost& cost, const QcqpData& q, const SdrOptions& opts) {
  SdrResult out;
  out.sdp = solve_diag_sdp(DiagSdpProblem::create(cost.c), opts.sdp);
  if (out.sdp.status != SdpStatus::optimal) {
    throw SolverError(std::string("unit-diagonal SDP did not converge (") + to_string(out.sdp.status) + " after " +
                      std::to_string(out.sdp.iterations) + " iterations): " + out.sdp.diagnostics);
  }
  const auto ext = extract_rank_one(out.sdp.x, opts.rank_ratio);
  out.eig_ratio = ext.eig_ratio;
  if (ext.x) {
    out.azimuth = finalize(cost, q, *ext.x, Tightness::rank_one);
    out.azimuth.iterations = out.sdp.iterations;
  } else {
    out.azimuth = solve_gp(cost, q, to_unit_modulus(ext.leading), opts.gp);
    out.azimuth.tightness = Tightness::rounded;
  }
  return out;
}

CertificateReport check_certificate(const CMatrix& x, const Eigen::VectorXd& y, const HomogeneousCost& cost,
                                    const QcqpData& q, double tol) {
  const Eigen::Index n = cost.c.rows();
  const Eigen::Index M = n - 1;
  if (x.rows() != n || x.cols() != n || y.size() != n || q.sensor_count() != M) {
    throw ValidationError("certificate inputs have inconsistent dimensions");
  }
  CertificateReport r;
  r.scale = std::max(1.0, max_abs_entry(cost.c));

  CMatrix z = cost.c;
  z.diagonal() += y.cast<std::complex<double>>();
  const CMatrix ph = q.projected_h();
  CMatrix block = ph.adjoint() * ph;
  block.diagonal() += y.head(M).cast<std::complex<double>>();

  r.diag_violation = (x.diagonal().array() - 1.0).abs().maxCoeff();
  r.primal_min_eig = min_eigenvalue(0.5 * (x + x.adjoint()));
  r.dual_min_eig = min_eigenvalue(0.5 * (z + z.adjoint()));
  r.complementarity_norm = (z * x).norm();
  r.block_min_eig = min_eigenvalue(0.5 * (block + block.adjoint()));

  r.primal_feasible = r.diag_violation <= tol && r.primal_min_eig >= -tol;
  r.dual_feasible = r.dual_min_eig / r.scale >= -tol;
  r.complementary = r.complementarity_norm / r.scale <= tol;
  r.strictly_positive = r.block_min_eig / r.scale > tol;
  return r;
}

ConstructedCertificate construct_certificate(const QcqpData& q) {
  const Eigen::Index M = q.h.cols();
  const CMatrix ph = q.projected_h();
  const CMatrix a = ph.adjoint() * ph;
  const CVector b = ph.adjoint() * q.project(q.c);
  Eigen::LLT<CMatrix> llt(a);
  if (llt.info() != Eigen::Success || min_eigenvalue(a) <= 1e-14 * std::max(1.0, max_abs_entry(a))) {
    throw DegenerateGeometryError("H'PH is singular; the certificate construction needs P H of full column rank");
  }
  const CVector sol = llt.solve(b);
  ConstructedCertificate out;
  out.x = CVector(M + 1);
  out.x.head(M) = -sol;
  out.x(M) = 1.0;
  out.big_x = out.x * out.x.adjoint();
  out.y = Eigen::VectorXd::Zero(M + 1);
  out.y(M) = b.dot(sol).real();
  return out;
}

}  // namespace sensreg
