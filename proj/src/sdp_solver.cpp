// SPDX-License-Identifier: Apache-2.0

#include "sensreg/sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "sensreg/errors.hpp"

namespace sensreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNeighbourhood = 1e-3;
constexpr int kMaxBacktracks = 60;
constexpr int kMaxPolishSweeps = 5000;

CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

// Largest alpha with A + alpha D still positive semidefinite, given A positive definite.
std::optional<double> max_step(const CMatrix& a, const CMatrix& d) {
  Eigen::LLT<CMatrix> llt(a);
  if (llt.info() != Eigen::Success) return std::nullopt;
  CMatrix w = llt.matrixL().solve(d);
  w = llt.matrixL().solve(w.adjoint().eval()).adjoint().eval();
  const double lmin = min_eigenvalue(hermitian_part(w));
  if (lmin >= 0.0) return kInf;
  return -1.0 / lmin;
}

// lambda_min(L' Z L) with X = L L'; the spectrum equals that of X Z.
double centrality(const CMatrix& x, const CMatrix& z) {
  Eigen::LLT<CMatrix> llt(x);
  if (llt.info() != Eigen::Success) return -kInf;
  const CMatrix l = llt.matrixL();
  return min_eigenvalue(hermitian_part(l.adjoint() * z * l));
}

struct FacePair {
  CMatrix x;
  Eigen::VectorXd y;
};

// Row-wise exact minimisation of Tr(C V V') over unit-norm rows of V. Returns the
// multipliers y_i = |g_i| - C_ii that make (C + Diag(y)) V = 0 at a fixed point.
Eigen::VectorXd mix_rows(const CMatrix& c, CMatrix& v) {
  const Eigen::Index n = c.rows();
  Eigen::VectorXd y(n);
  for (int sweep = 0; sweep < kMaxPolishSweeps; ++sweep) {
    double change = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::RowVectorXcd g = c.row(i) * v - c(i, i) * v.row(i);
      const double gn = g.norm();
      if (gn == 0.0) continue;
      g /= -gn;
      change = std::max(change, (g - v.row(i)).norm());
      v.row(i) = g;
    }
    if (change < 1e-15) break;
  }
  for (Eigen::Index i = 0; i < n; ++i) y(i) = (c.row(i) * v - c(i, i) * v.row(i)).norm() - c(i, i).real();
  return y;
}

// Refines an interior iterate on the face spanned by its leading eigenvectors. The smallest
// rank whose multipliers give C + Diag(y) >= -tol wins.
std::optional<FacePair> polish(const CMatrix& c, const CMatrix& x, double tol) {
  const Eigen::Index n = c.rows();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(x);
  for (Eigen::Index r = 1; r < n; ++r) {
    CMatrix v(n, r);
    for (Eigen::Index k = 0; k < r; ++k) {
      v.col(k) = es.eigenvectors().col(n - 1 - k) * std::sqrt(std::max(0.0, es.eigenvalues()(n - 1 - k)));
    }
    bool ok = true;
    for (Eigen::Index i = 0; i < n && ok; ++i) {
      const double rn = v.row(i).norm();
      if (rn == 0.0) ok = false;
      else v.row(i) /= rn;
    }
    if (!ok) continue;
    FacePair out;
    out.y = mix_rows(c, v);
    CMatrix z = c;
    z.diagonal() += out.y.cast<std::complex<double>>();
    if (!out.y.allFinite() || min_eigenvalue(z) < -tol) continue;
    out.x = hermitian_part(v * v.adjoint());
    out.x.diagonal().setOnes();
    return out;
  }
  return std::nullopt;
}

struct Direction {
  CMatrix dx;
  Eigen::VectorXd dy;
};

// Solves Re(X o Zinv^T) dy = Re diag(R Zinv) and recovers the symmetrised dX = R Zinv - X Diag(dy) Zinv,
// where `r_zinv` = R Zinv is supplied by the caller.
std::optional<Direction> hkm_direction(const CMatrix& x, const CMatrix& zinv, const Eigen::LLT<Eigen::MatrixXd>& schur,
                                       const CMatrix& r_zinv) {
  const Eigen::Index n = x.rows();
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) rhs(i) = r_zinv(i, i).real();
  Direction d;
  d.dy = schur.solve(rhs);
  if (!d.dy.allFinite()) return std::nullopt;
  CMatrix dx = r_zinv - x * d.dy.asDiagonal() * zinv;
  d.dx = hermitian_part(dx);
  for (Eigen::Index i = 0; i < n; ++i) d.dx(i, i) = 0.0;
  return d;
}

}  // namespace

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::optimal:
      return "optimal";
    case SdpStatus::max_iter:
      return "max_iter";
    case SdpStatus::numerical_failure:
      return "numerical_failure";
  }
  return "unknown";
}

double max_abs_entry(const CMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

double min_eigenvalue(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

Eigen::MatrixXd real_embedding(const CMatrix& a) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = a.real();
  out.topRightCorner(n, n) = -a.imag();
  out.bottomLeftCorner(n, n) = a.imag();
  out.bottomRightCorner(n, n) = a.real();
  return out;
}

DiagSdpProblem DiagSdpProblem::create(CMatrix c) {
  if (c.rows() != c.cols()) throw ValidationError("SDP cost matrix must be square");
  if (c.rows() < 2) throw ValidationError("SDP needs n >= 2");
  if (!c.allFinite()) throw ValidationError("SDP cost matrix has non-finite entries");
  const double scale = std::max(1.0, max_abs_entry(c));
  const double asym = max_abs_entry(c - c.adjoint());
  if (asym > 1e-12 * scale) {
    std::ostringstream msg;
    msg << "SDP cost matrix is not Hermitian (max |C - C^H| = " << asym << ")";
    throw ValidationError(msg.str());
  }
  return DiagSdpProblem(hermitian_part(c));
}

double duality_gap(const CMatrix& x, const Eigen::VectorXd& y, const CMatrix& c) {
  return (c.cwiseProduct(x.transpose())).sum().real() + y.sum();
}

DiagSdpSolution solve_diag_sdp(const DiagSdpProblem& problem, const SdpOptions& opts) {
  const Eigen::Index n = problem.size();
  const double scale = max_abs_entry(problem.cost()) > 0.0 ? max_abs_entry(problem.cost()) : 1.0;
  const CMatrix c = problem.cost() / scale;

  CMatrix x = CMatrix::Identity(n, n);
  Eigen::VectorXd y = Eigen::VectorXd::Constant(n, std::abs(min_eigenvalue(c)) + 1.0);
  CMatrix z = c;
  z.diagonal() += y.cast<std::complex<double>>();

  DiagSdpSolution sol;
  auto finish = [&](SdpStatus status, int iters, std::string diag) {
    sol.x = x;
    sol.y = y * scale;
    sol.primal_obj = c.cwiseProduct(x.transpose()).sum().real() * scale;
    sol.dual_obj = -y.sum() * scale;
    sol.gap = sol.primal_obj - sol.dual_obj;
    sol.iterations = iters;
    sol.status = status;
    sol.diagnostics = std::move(diag);
    return sol;
  };

  const double nd = static_cast<double>(n);
  for (int iter = 0;; ++iter) {
    const double pobj = c.cwiseProduct(x.transpose()).sum().real();
    const double gap = z.cwiseProduct(x.transpose()).sum().real();
    if (gap <= opts.tol * (1.0 + std::abs(pobj))) {
      if (opts.polish) {
        if (auto face = polish(c, x, opts.tol)) {
          const double fgap = duality_gap(face->x, face->y, c);
          if (std::abs(fgap) <= gap) {
            x = std::move(face->x);
            y = std::move(face->y);
          }
        }
      }
      return finish(SdpStatus::optimal, iter, {});
    }
    if (iter >= opts.max_iter) {
      std::ostringstream msg;
      msg << "reached " << opts.max_iter << " iterations with relative gap " << gap / (1.0 + std::abs(pobj));
      return finish(SdpStatus::max_iter, iter, msg.str());
    }

    Eigen::LLT<CMatrix> zllt(z);
    if (zllt.info() != Eigen::Success) {
      return finish(SdpStatus::numerical_failure, iter, "dual slack lost positive definiteness");
    }
    const CMatrix zinv = zllt.solve(CMatrix::Identity(n, n));
    Eigen::MatrixXd schur(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) schur(i, j) = (x(i, j) * zinv(j, i)).real();
    Eigen::LLT<Eigen::MatrixXd> schur_llt(0.5 * (schur + schur.transpose()));
    if (schur_llt.info() != Eigen::Success) {
      return finish(SdpStatus::numerical_failure, iter, "Schur complement system is indefinite");
    }

    const double mu = gap / nd;

    // Predictor (affine scaling, sigma = 0): R Zinv = -X.
    const auto pred = hkm_direction(x, zinv, schur_llt, -x);
    if (!pred) return finish(SdpStatus::numerical_failure, iter, "predictor direction is not finite");
    const CMatrix dz_pred = pred->dy.cast<std::complex<double>>().asDiagonal();
    const auto ap_max = max_step(x, pred->dx);
    const auto ad_max = max_step(z, dz_pred);
    if (!ap_max || !ad_max) return finish(SdpStatus::numerical_failure, iter, "iterate left the PSD cone");
    const double ap = std::min(1.0, *ap_max);
    const double ad = std::min(1.0, *ad_max);
    const double mu_aff =
        (z + ad * dz_pred).cwiseProduct((x + ap * pred->dx).transpose()).sum().real() / nd;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    // Corrector: R = sigma mu I - XZ - dXp dZp.
    const CMatrix r_zinv = sigma * mu * zinv - x - pred->dx * dz_pred * zinv;
    const auto corr = hkm_direction(x, zinv, schur_llt, r_zinv);
    if (!corr) return finish(SdpStatus::numerical_failure, iter, "corrector direction is not finite");
    const CMatrix dz = corr->dy.cast<std::complex<double>>().asDiagonal();
    const auto cp_max = max_step(x, corr->dx);
    const auto cd_max = max_step(z, dz);
    if (!cp_max || !cd_max) return finish(SdpStatus::numerical_failure, iter, "iterate left the PSD cone");
    double alpha_p = std::min(1.0, opts.step_fraction * *cp_max);
    double alpha_d = std::min(1.0, opts.step_fraction * *cd_max);

    // Shorten the step until the new pair stays in the wide neighbourhood
    // lambda_min(X^1/2 Z X^1/2) >= gamma mu.
    CMatrix xn, zn;
    Eigen::VectorXd yn;
    for (int bt = 0;; ++bt) {
      xn = hermitian_part(x + alpha_p * corr->dx);
      xn.diagonal().setOnes();
      yn = y + alpha_d * corr->dy;
      zn = c;
      zn.diagonal() += yn.cast<std::complex<double>>();
      const double mun = zn.cwiseProduct(xn.transpose()).sum().real() / nd;
      if (centrality(xn, zn) >= kNeighbourhood * mun) break;
      if (bt == kMaxBacktracks) {
        return finish(SdpStatus::numerical_failure, iter, "no step keeps the iterate near the central path");
      }
      alpha_p *= 0.8;
      alpha_d *= 0.8;
    }
    x = std::move(xn);
    y = std::move(yn);
    z = std::move(zn);
  }
}

CVector to_unit_modulus(const CVector& v) {
  CVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    out(i) = a > 0.0 ? v(i) / a : std::complex<double>(1.0, 0.0);
  }
  return out;
}

RankOneExtraction extract_rank_one(const CMatrix& x, double ratio_threshold) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(x));
  const Eigen::Index n = x.rows();
  RankOneExtraction out;
  out.eigenvalues = es.eigenvalues().reverse();
  const double l1 = out.eigenvalues(0);
  const double l2 = n > 1 ? std::max(0.0, out.eigenvalues(1)) : 0.0;
  out.leading = std::sqrt(std::max(0.0, l1)) * es.eigenvectors().col(n - 1);
  out.eig_ratio = l1 > 0.0 ? l2 / l1 : 1.0;
  if (l1 > 0.0 && out.eig_ratio < ratio_threshold) out.x = to_unit_modulus(out.leading);
  return out;
}

}  // namespace sensreg
