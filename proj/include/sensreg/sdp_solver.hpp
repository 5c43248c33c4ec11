// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>

#include <Eigen/Core>

namespace sensreg {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// min Tr(C X) s.t. diag(X) = 1, X >= 0 over n x n Hermitian X.
class DiagSdpProblem {
 public:
  /// Throws ValidationError if C is not square, n < 2, or C deviates from
  /// Hermitian by more than 1e-12 relative to its largest entry.
  static DiagSdpProblem create(CMatrix c);

  const CMatrix& cost() const { return c_; }
  Eigen::Index size() const { return c_.rows(); }

 private:
  explicit DiagSdpProblem(CMatrix c) : c_(std::move(c)) {}
  CMatrix c_;
};

enum class SdpStatus { optimal, max_iter, numerical_failure };

const char* to_string(SdpStatus s);

struct SdpOptions {
  double tol = 1e-9;  // relative duality gap
  int max_iter = 100;
  double step_fraction = 0.98;
  bool polish = true;  // refine the final iterate on the face of its numerical rank
};

/// Primal X and dual y of the unit-diagonal SDP. The dual is max -1'y s.t. C + Diag(y) >= 0,
/// so dual_obj = -sum(y) and gap = Tr(CX) + sum(y) >= 0.
struct DiagSdpSolution {
  CMatrix x;
  Eigen::VectorXd y;
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double gap = 0.0;
  int iterations = 0;
  SdpStatus status = SdpStatus::numerical_failure;
  std::string diagnostics;
};

/// Primal-dual path following (HKM direction, Mehrotra predictor-corrector) started from the
/// strictly feasible pair X = I, y = (|lambda_min(C)| + 1) 1. Both blocks stay feasible; only
/// complementarity is driven to zero. The cost is normalised by its largest entry internally.
/// With polish on, the returned pair typically has ||(C + Diag(y)) X||_F near machine precision
/// times the scale of C; without it the residual behaves like sqrt(gap).
DiagSdpSolution solve_diag_sdp(const DiagSdpProblem& problem, const SdpOptions& opts = {});

/// Tr(C X) + 1'y.
double duality_gap(const CMatrix& x, const Eigen::VectorXd& y, const CMatrix& c);

struct RankOneExtraction {
  std::optional<CVector> x;   // unit-modulus entries when rank one
  double eig_ratio = 1.0;     // lambda_2 / lambda_1
  Eigen::VectorXd eigenvalues;  // descending
  CVector leading;            // sqrt(lambda_1) * leading eigenvector, unnormalised
};

/// Declares X rank one when lambda_2 / lambda_1 < ratio_threshold.
RankOneExtraction extract_rank_one(const CMatrix& x, double ratio_threshold = 1e-6);

/// Projects every entry onto the unit circle (zeros map to 1).
CVector to_unit_modulus(const CVector& v);

double min_eigenvalue(const CMatrix& a);
double max_abs_entry(const CMatrix& a);

/// [[Re A, -Im A], [Im A, Re A]]; the spectrum of a Hermitian A appears twice in it.
Eigen::MatrixXd real_embedding(const CMatrix& a);

}  // namespace sensreg
