// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "sensreg/errors.hpp"
#include "sensreg/sdp_solver.hpp"

using namespace sensreg;
using cd = std::complex<double>;

namespace {

CMatrix random_hermitian(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> g;
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = cd(g(rng), g(rng));
  }
  return scale * (a + a.adjoint()) / 2.0;
}

CVector random_unit(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  CVector x(n);
  for (int i = 0; i < n; ++i) x(i) = std::polar(1.0, u(rng));
  return x;
}

double eig_min(const CMatrix& a) { return Eigen::SelfAdjointEigenSolver<CMatrix>(a).eigenvalues()(0); }

}  // namespace

TEST(DiagSdpProblem, RejectsBadInput) {
  EXPECT_THROW(DiagSdpProblem::create(CMatrix::Zero(2, 3)), ValidationError);
  EXPECT_THROW(DiagSdpProblem::create(CMatrix::Zero(1, 1)), ValidationError);
  CMatrix c = CMatrix::Zero(2, 2);
  c(0, 1) = cd(1.0, 0.0);
  EXPECT_THROW(DiagSdpProblem::create(c), ValidationError);
  c(1, 0) = cd(1.0, 1e-6);
  EXPECT_THROW(DiagSdpProblem::create(c), ValidationError);
  c(1, 0) = cd(1.0, 0.0);
  EXPECT_NO_THROW(DiagSdpProblem::create(c));
  c(0, 0) = cd(std::nan(""), 0.0);
  EXPECT_THROW(DiagSdpProblem::create(c), ValidationError);
}

TEST(SolveDiagSdp, TwoByTwoAnalytic) {
  CMatrix c(2, 2);
  c << 0.0, -1.0, -1.0, 0.0;
  const auto sol = solve_diag_sdp(DiagSdpProblem::create(c));
  ASSERT_EQ(sol.status, SdpStatus::optimal) << sol.diagnostics;
  EXPECT_NEAR(sol.primal_obj, -2.0, 1e-9);
  EXPECT_NEAR(sol.dual_obj, -2.0, 1e-9);
  EXPECT_NEAR(sol.x(0, 1).real(), 1.0, 1e-8);
  EXPECT_NEAR(sol.x(1, 1).real(), 1.0, 1e-12);
  EXPECT_LT(std::abs(duality_gap(sol.x, sol.y, c)), 1e-9);
}

TEST(SolveDiagSdp, IdentityCost) {
  for (int n : {2, 3, 6}) {
    const CMatrix c = CMatrix::Identity(n, n);
    const auto sol = solve_diag_sdp(DiagSdpProblem::create(c));
    ASSERT_EQ(sol.status, SdpStatus::optimal);
    EXPECT_NEAR(sol.primal_obj, n, 1e-8 * n);
    EXPECT_LT((sol.x.diagonal().real().array() - 1.0).abs().maxCoeff(), 1e-9);
  }
}

TEST(SolveDiagSdp, ZeroCost) {
  const auto sol = solve_diag_sdp(DiagSdpProblem::create(CMatrix::Zero(4, 4)));
  ASSERT_EQ(sol.status, SdpStatus::optimal);
  EXPECT_LT(std::abs(sol.primal_obj), 1e-9);
  EXPECT_LT((sol.x.diagonal().real().array() - 1.0).abs().maxCoeff(), 1e-9);
}

TEST(SolveDiagSdp, RandomSandwich) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix c = random_hermitian(rng, 4);
    const auto sol = solve_diag_sdp(DiagSdpProblem::create(c));
    ASSERT_EQ(sol.status, SdpStatus::optimal);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 100000; ++i) {
      const CVector x = random_unit(rng, 4);
      best = std::min(best, (x.adjoint() * c * x)(0).real());
    }
    EXPECT_LE(sol.primal_obj, best + 1e-8);
    EXPECT_LE(sol.dual_obj, sol.primal_obj + 1e-9);
  }
}

TEST(SolveDiagSdp, OptimalityInvariants) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 7;
    const CMatrix c = random_hermitian(rng, n, trial % 3 == 0 ? 1e4 : 1.0);
    const SdpOptions opts;
    const auto sol = solve_diag_sdp(DiagSdpProblem::create(c), opts);
    ASSERT_EQ(sol.status, SdpStatus::optimal) << sol.diagnostics;
    const double scale = std::max(1.0, max_abs_entry(c));
    EXPECT_LT((sol.x.diagonal().real().array() - 1.0).abs().maxCoeff(), opts.tol);
    EXPECT_GE(eig_min(sol.x), -opts.tol);
    const CMatrix z = c + CMatrix(sol.y.cast<cd>().asDiagonal());
    EXPECT_GE(eig_min(z) / scale, -opts.tol);
    EXPECT_LE(std::abs(sol.gap), opts.tol * (1 + std::abs(sol.primal_obj)));
    EXPECT_LE(sol.dual_obj, sol.primal_obj + 1e-9 * scale);
    // complementarity constant: |ZX|_F <= 10 n tol scale
    EXPECT_LE((z * sol.x).norm(), 10.0 * n * opts.tol * scale);
  }
}

TEST(SolveDiagSdp, ScaleEquivariance) {
  std::mt19937_64 rng(8);
  const CMatrix c = random_hermitian(rng, 5);
  const SdpOptions opts;
  const auto a = solve_diag_sdp(DiagSdpProblem::create(c), opts);
  const auto b = solve_diag_sdp(DiagSdpProblem::create(37.0 * c), opts);
  ASSERT_EQ(a.status, SdpStatus::optimal);
  ASSERT_EQ(b.status, SdpStatus::optimal);
  EXPECT_LT((a.x - b.x).cwiseAbs().maxCoeff(), 10 * opts.tol);
  EXPECT_NEAR(b.primal_obj, 37.0 * a.primal_obj, 1e-8 * 37.0 * std::abs(a.primal_obj));
  EXPECT_LT((b.y - 37.0 * a.y).cwiseAbs().maxCoeff(), 1e-6 * 37.0 * (1 + a.y.cwiseAbs().maxCoeff()));
}

TEST(SolveDiagSdp, MaxIterStatus) {
  std::mt19937_64 rng(2);
  SdpOptions opts;
  opts.max_iter = 1;
  const auto sol = solve_diag_sdp(DiagSdpProblem::create(random_hermitian(rng, 5)), opts);
  EXPECT_EQ(sol.status, SdpStatus::max_iter);
  EXPECT_EQ(sol.iterations, 1);
  EXPECT_FALSE(sol.diagnostics.empty());
  EXPECT_STREQ(to_string(SdpStatus::max_iter), "max_iter");
}

TEST(SolveDiagSdp, AgreesWithRealEmbeddingSpectrum) {
  std::mt19937_64 rng(3);
  const CMatrix c = random_hermitian(rng, 4);
  const Eigen::VectorXd ce = Eigen::SelfAdjointEigenSolver<CMatrix>(c).eigenvalues();
  const Eigen::VectorXd re = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(real_embedding(c)).eigenvalues();
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(re(2 * i), ce(i), 1e-12);
    EXPECT_NEAR(re(2 * i + 1), ce(i), 1e-12);
  }
  EXPECT_NEAR(min_eigenvalue(c), ce(0), 1e-12);
}

TEST(DualityGap, StartingPointValue) {
  std::mt19937_64 rng(5);
  const int n = 5;
  const CMatrix c = random_hermitian(rng, n);
  const double lmin = eig_min(c);
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(n, std::abs(lmin) + 1.0);
  const double want = c.trace().real() + n * (std::abs(lmin) + 1.0);
  EXPECT_NEAR(duality_gap(CMatrix::Identity(n, n), y, c), want, 1e-12 * std::abs(want));
}

TEST(DualityGap, EqualsTraceOfSlackTimesX) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 4;
    const CMatrix c = random_hermitian(rng, n);
    // random feasible X: normalised Gram matrix
    CMatrix v(n, n + 1);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= n; ++j) v(i, j) = cd(g(rng), g(rng));
      v.row(i).normalize();
    }
    const CMatrix x = v * v.adjoint();
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = g(rng);
    const CMatrix z = c + CMatrix(y.cast<cd>().asDiagonal());
    EXPECT_NEAR(duality_gap(x, y, c), (z * x).trace().real(), 1e-10);
  }
}

TEST(DualityGap, TwoByTwoOptimal) {
  CMatrix c(2, 2);
  c << 0.0, -1.0, -1.0, 0.0;
  const auto sol = solve_diag_sdp(DiagSdpProblem::create(c));
  EXPECT_LT(std::abs(duality_gap(sol.x, sol.y, c)), 1e-9);
}

TEST(ExtractRankOne, ExactRankOne) {
  std::mt19937_64 rng(9);
  const CVector x = random_unit(rng, 5);
  const auto r = extract_rank_one(x * x.adjoint());
  ASSERT_TRUE(r.x.has_value());
  EXPECT_LT(r.eig_ratio, 1e-12);
  const cd phase = (*r.x)(0) / x(0);
  for (int i = 0; i < 5; ++i) {
    EXPECT_LT(std::abs(std::abs((*r.x)(i)) - 1.0), 1e-10);
    EXPECT_LT(std::abs((*r.x)(i) - phase * x(i)), 1e-10);
  }
}

TEST(ExtractRankOne, IdentityIsNotRankOne) {
  const auto r = extract_rank_one(CMatrix::Identity(4, 4));
  EXPECT_FALSE(r.x.has_value());
  EXPECT_NEAR(r.eig_ratio, 1.0, 1e-12);
}

TEST(ExtractRankOne, ThresholdMatters) {
  std::mt19937_64 rng(10);
  const int n = 4;
  const CVector x = random_unit(rng, n);
  const CMatrix mix = 0.999 * x * x.adjoint() + 0.001 * CMatrix::Identity(n, n);
  // spectrum: 0.999 n + 0.001 once, 0.001 otherwise
  const double ratio = 0.001 / (0.999 * n + 0.001);
  const auto strict = extract_rank_one(mix, 1e-6);
  EXPECT_FALSE(strict.x.has_value());
  EXPECT_NEAR(strict.eig_ratio, ratio, 1e-12);
  EXPECT_TRUE(extract_rank_one(mix, 1e-2).x.has_value());
  EXPECT_GE(strict.eigenvalues(0), strict.eigenvalues(1));
}

TEST(ToUnitModulus, ProjectsEntries) {
  CVector v(3);
  v << cd(3, 4), cd(0, 0), cd(-2, 0);
  const CVector u = to_unit_modulus(v);
  EXPECT_NEAR(std::abs(u(0) - cd(0.6, 0.8)), 0.0, 1e-15);
  EXPECT_EQ(u(1), cd(1, 0));
  EXPECT_NEAR(std::abs(u(2) - cd(-1, 0)), 0.0, 1e-15);
}
