#include <gtest/gtest.h>

#include <random>

#include "sparsecov/solvers.hpp"
#include "test_support.hpp"

using namespace sparsecov;
using namespace sparsecov::testing;

namespace {

Eigen::MatrixXd mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

double oracle_objective(const SymMatrix& s, const WeightMatrix& w, bool covariance, const SymMatrix& start) {
  const Index p = s.dim();
  Eigen::VectorXd x = pack_upper(start.mat());
  return coordinate_brent_minimize(
      [&](const Eigen::VectorXd& v) { return dense_weighted_objective(s.mat(), unpack_upper(v, p), w.mat(), covariance); },
      x);
}

}  // namespace

TEST(SoftThreshold, Examples) {
  EXPECT_EQ(soft_threshold(3.0, 1.0), 2.0);
  EXPECT_EQ(soft_threshold(0.5, 1.0), 0.0);
  EXPECT_EQ(soft_threshold(-2.0, 0.5), -1.5);
}

TEST(WeightMatrix, SymmetrizedZeroDiagonal) {
  const WeightMatrix w(mat2(5.0, 1.0, 3.0, 5.0));
  EXPECT_EQ(w(0, 0), 0.0);
  EXPECT_EQ(w(0, 1), 2.0);
  EXPECT_EQ(w(1, 0), 2.0);
  EXPECT_THROW(WeightMatrix(mat2(0, -1, -1, 0)), InvalidInput);
  EXPECT_TRUE(WeightMatrix::zero(3).all_offdiag_zero());
  EXPECT_FALSE(WeightMatrix::uniform(3, 0.1).all_offdiag_zero());
}

TEST(SolverOptions, Validation) {
  EXPECT_THROW((SolverOptions{0.0, 10, 0.5}).validate(), InvalidInput);
  EXPECT_THROW((SolverOptions{1e-6, 0, 0.5}).validate(), InvalidInput);
  EXPECT_THROW((SolverOptions{1e-6, 10, 1.0}).validate(), InvalidInput);
  EXPECT_NO_THROW(SolverOptions{}.validate());
}

TEST(Lasso, Examples) {
  const LassoResult scalar = lasso_weighted(Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Constant(1, 0.8),
                                            Eigen::VectorXd::Constant(1, 0.3), SolverOptions{});
  EXPECT_NEAR(scalar.beta(0), 0.5, 1e-12);

  const LassoResult sep = lasso_weighted(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(1.0, 0.1),
                                         Eigen::Vector2d(0.2, 0.2), SolverOptions{});
  EXPECT_NEAR(sep.beta(0), 0.8, 1e-12);
  EXPECT_EQ(sep.beta(1), 0.0);

  std::mt19937_64 rng(2);
  const SymMatrix g = random_pd(rng, 5);
  const LassoResult zero =
      lasso_weighted(g.mat(), Eigen::VectorXd::Zero(5), Eigen::VectorXd::Constant(5, 0.1), SolverOptions{});
  EXPECT_EQ(zero.beta, Eigen::VectorXd::Zero(5));
}

TEST(Lasso, ZeroWeightsSolveNormalEquations) {
  std::mt19937_64 rng(4);
  const SymMatrix g = random_pd(rng, 6);
  const Eigen::VectorXd r = random_matrix(rng, 6, 1);
  const LassoResult res = lasso_weighted(g.mat(), r, Eigen::VectorXd::Zero(6), SolverOptions{1e-12, 100000, 0.5});
  EXPECT_TRUE(res.converged);
  EXPECT_LE((g.mat() * res.beta - r).norm(), 1e-9 * r.norm());
}

TEST(Lasso, KktConditions) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const SymMatrix g = random_pd(rng, 7);
    const Eigen::VectorXd r = random_matrix(rng, 7, 1);
    const Eigen::VectorXd w = Eigen::VectorXd::Constant(7, 0.4);
    const LassoResult res = lasso_weighted(g.mat(), r, w, SolverOptions{1e-12, 100000, 0.5});
    const Eigen::VectorXd grad = g.mat() * res.beta - r;
    for (Index j = 0; j < 7; ++j) {
      if (res.beta(j) != 0.0) {
        EXPECT_NEAR(grad(j), -w(j) * (res.beta(j) > 0 ? 1.0 : -1.0), 1e-8);
      } else {
        EXPECT_LE(std::abs(grad(j)), w(j) + 1e-8);
      }
    }
  }
}

TEST(Glasso, UnpenalizedIsInverse) {
  const GlassoResult res =
      glasso_weighted(SymMatrix::diagonal(Eigen::Vector2d(2.0, 4.0)), WeightMatrix::zero(2), SolverOptions{});
  EXPECT_TRUE(res.omega.mat().isApprox(Eigen::Vector2d(0.5, 0.25).asDiagonal().toDenseMatrix(), 1e-12));
  EXPECT_TRUE(res.converged);
}

TEST(Glasso, ThresholdedOffDiagonal) {
  const SymMatrix s(mat2(1.0, 0.3, 0.3, 1.0));
  const GlassoResult res = glasso_weighted(s, WeightMatrix::uniform(2, 0.5), SolverOptions{});
  EXPECT_TRUE(res.omega.mat().isApprox(Eigen::MatrixXd::Identity(2, 2), 1e-12));
  EXPECT_NEAR(oracle_objective(s, WeightMatrix::uniform(2, 0.5), false, SymMatrix::identity(2)) -
                  glasso_objective(s, res.omega, WeightMatrix::uniform(2, 0.5)),
              0.0, 1e-8);
}

TEST(Glasso, MatchesBruteForceP3) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const SymMatrix s = random_pd(rng, 3);
    const WeightMatrix w = WeightMatrix::uniform(3, 0.2);
    const GlassoResult res = glasso_weighted(s, w, SolverOptions{});
    const double oracle = oracle_objective(s, w, false, SymMatrix::diagonal(s.diag().cwiseInverse()));
    EXPECT_NEAR(glasso_objective(s, res.omega, w), oracle, 1e-4);
  }
}

TEST(Glasso, InverseConsistentAndPd) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const SymMatrix s = random_pd(rng, 8);
    const GlassoResult res = glasso_weighted(s, WeightMatrix::uniform(8, 0.1), SolverOptions{});
    EXPECT_TRUE(is_positive_definite(res.omega));
    EXPECT_LE((res.omega.mat() * res.sigma.mat() - Eigen::MatrixXd::Identity(8, 8)).norm(), 1e-8);
  }
}

TEST(Glasso, SingularSampleNeedsPenalty) {
  Eigen::VectorXd v(3);
  v << 1.0, 2.0, 3.0;
  const SymMatrix s(v * v.transpose() + 1e-14 * Eigen::MatrixXd::Identity(3, 3));
  EXPECT_THROW(glasso_weighted(s, WeightMatrix::zero(3), SolverOptions{}), NotPositiveDefinite);
  EXPECT_NO_THROW(glasso_weighted(s, WeightMatrix::uniform(3, 0.5), SolverOptions{}));
}

TEST(Prox, UnpenalizedIsSample) {
  std::mt19937_64 rng(19);
  const SymMatrix s = random_pd(rng, 5);
  const ProxResult res = prox_covariance_weighted(s, WeightMatrix::zero(5), SymMatrix::diagonal(s.diag()),
                                                  SolverOptions{1e-10, 5000, 0.5});
  EXPECT_LE((res.sigma.mat() - s.mat()).norm(), 1e-6 * s.mat().norm());
}

TEST(Prox, DiagonalSampleIsFixed) {
  const SymMatrix s = SymMatrix::diagonal(Eigen::Vector2d(1.5, 0.25));
  const ProxResult res = prox_covariance_weighted(s, WeightMatrix::uniform(2, 0.3), s, SolverOptions{});
  EXPECT_TRUE(res.sigma.mat().isApprox(s.mat(), 1e-12));
  EXPECT_NEAR(oracle_objective(s, WeightMatrix::uniform(2, 0.3), true, SymMatrix::identity(2)),
              covariance_objective(s, res.sigma, WeightMatrix::uniform(2, 0.3)), 1e-8);
}

TEST(Prox, SaturatedWeightsGiveDiagonal) {
  std::mt19937_64 rng(21);
  const SymMatrix s = random_pd(rng, 6);
  const WeightMatrix w = WeightMatrix::uniform(6, 1e3 * s.max_abs());
  const ProxResult res = prox_covariance_weighted(s, w, SymMatrix::identity(6), SolverOptions{});
  Eigen::MatrixXd off = res.sigma.mat();
  off.diagonal().setZero();
  EXPECT_LE(off.cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE((res.sigma.diag() - s.diag()).cwiseAbs().maxCoeff(), 1e-4 * s.diag().maxCoeff());
}

TEST(Prox, TraceMonotoneAndPd) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    const SymMatrix s = random_pd(rng, 7);
    const ProxResult res =
        prox_covariance_weighted(s, WeightMatrix::uniform(7, 0.15), SymMatrix::diagonal(s.diag()), SolverOptions{});
    EXPECT_TRUE(is_positive_definite(res.sigma));
    for (std::size_t k = 1; k < res.objective_trace.size(); ++k) {
      EXPECT_LE(res.objective_trace[k], res.objective_trace[k - 1] + 1e-10);
    }
  }
}

TEST(Prox, PinnedDiagonalStaysPut) {
  std::mt19937_64 rng(37);
  const SymMatrix s = random_pd(rng, 5);
  const ProxResult res =
      prox_covariance_weighted(s, WeightMatrix::uniform(5, 0.05), SymMatrix::identity(5), SolverOptions{}, true);
  for (Index i = 0; i < 5; ++i) EXPECT_EQ(res.sigma(i, i), 1.0);
}

TEST(Prox, MatchesBruteForceP2P3) {
  std::mt19937_64 rng(43);
  for (Index p : {2, 3}) {
    for (double lambda : {0.1, 0.3}) {
      const SymMatrix s = random_pd(rng, p);
      const WeightMatrix w = WeightMatrix::uniform(p, lambda);
      const ProxResult res = prox_covariance_weighted(s, w, SymMatrix::diagonal(s.diag()), SolverOptions{});
      const double oracle = oracle_objective(s, w, true, SymMatrix::diagonal(s.diag()));
      EXPECT_NEAR(covariance_objective(s, res.sigma, w), oracle, 1e-4);
    }
  }
}
