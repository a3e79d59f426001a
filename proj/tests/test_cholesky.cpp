#include <gtest/gtest.h>

#include <boost/math/tools/minima.hpp>

#include <random>

#include "sparsecov/cholesky.hpp"
#include "test_support.hpp"

using namespace sparsecov;
using namespace sparsecov::testing;

namespace {

EstimatorConfig config(Target target, const Penalty& pen) {
  EstimatorConfig cfg;
  cfg.target = target;
  cfg.penalty = pen;
  return cfg;
}

SymMatrix ar1(Index p, double phi) {
  Eigen::MatrixXd m(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) m(i, j) = std::pow(phi, std::abs(static_cast<double>(i - j)));
  }
  return SymMatrix(m);
}

}  // namespace

TEST(Mcd, Identity) {
  const MCDPair m = mcd(SymMatrix::identity(4));
  EXPECT_TRUE(m.t.mat().isApprox(Eigen::MatrixXd::Identity(4, 4)));
  EXPECT_TRUE(m.d.values().isApprox(Eigen::VectorXd::Ones(4)));
}

TEST(Mcd, Ar1) {
  const MCDPair m = mcd(ar1(3, 0.5));
  EXPECT_NEAR(m.t(1, 0), -0.5, 1e-14);
  EXPECT_NEAR(m.t(2, 1), -0.5, 1e-14);
  EXPECT_NEAR(m.t(2, 0), 0.0, 1e-14);
  EXPECT_NEAR(m.d.values()(0), 1.0, 1e-14);
  EXPECT_NEAR(m.d.values()(1), 0.75, 1e-14);
  EXPECT_NEAR(m.d.values()(2), 0.75, 1e-14);
}

TEST(Mcd, RoundTrip) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 30; ++trial) {
    const SymMatrix s = random_pd(rng, 1 + trial % 10);
    const MCDPair m = mcd(s);
    const Eigen::MatrixXd tinv = m.t.mat().inverse();
    const Eigen::MatrixXd back = tinv * m.d.values().asDiagonal() * tinv.transpose();
    EXPECT_LE((back - s.mat()).cwiseAbs().maxCoeff(), 1e-9 * s.max_abs());
    for (Index i = 0; i < s.dim(); ++i) EXPECT_EQ(m.t(i, i), 1.0);
  }
}

TEST(NlRoot, Examples) {
  EXPECT_DOUBLE_EQ(nl_diagonal_root(1.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(nl_diagonal_root(4.0, 0.0), 0.5);
  // g t^2 + c t - 1 = 0 with g = 1, c = 3/2 has root t = 1/2.
  EXPECT_NEAR(nl_diagonal_root(1.0, 1.5), 0.5, 1e-15);
}

TEST(NlRoot, MatchesScalarMinimization) {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> gdist(0.05, 5.0);
  std::uniform_real_distribution<double> cdist(-20.0, 20.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double g = gdist(rng);
    const double c = cdist(rng);
    auto f = [&](double t) { return g * t * t + 2.0 * c * t - 2.0 * std::log(t); };
    const auto [tmin, fmin] = boost::math::tools::brent_find_minima(f, 1e-9, 1e5, 52);
    const double root = nl_diagonal_root(g, c);
    EXPECT_GT(root, 0.0);
    EXPECT_LE(f(root), fmin + 1e-12 * (1.0 + std::abs(fmin)));
    EXPECT_NEAR(root, tmin, 1e-6 * (1.0 + tmin));
  }
}

TEST(CholeskyMl, UnpenalizedIsInverse) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    const SymMatrix s = random_pd(rng, 2 + trial % 8);
    const EstimationResult r = estimate_cholesky_ml(s, config(Target::CholeskyML, Penalty::l1(0.0)));
    EXPECT_LE((r.estimate.mat() - s.mat().inverse()).norm(), 1e-6 * s.mat().inverse().norm());
  }
}

TEST(CholeskyMl, IdentityForAnyLambda) {
  for (const Penalty& pen : {Penalty::l1(0.2), Penalty::scad(0.5), Penalty::hard(1.0)}) {
    const EstimationResult r = estimate_cholesky_ml(SymMatrix::identity(4), config(Target::CholeskyML, pen));
    EXPECT_TRUE(r.cholesky_t->mat().isApprox(Eigen::MatrixXd::Identity(4, 4)));
    EXPECT_TRUE(r.cholesky_d->values().isApprox(Eigen::VectorXd::Ones(4)));
  }
}

TEST(CholeskyMl, HalfStepsAreMonotone) {
  std::mt19937_64 rng(54);
  for (int trial = 0; trial < 20; ++trial) {
    const SymMatrix s = random_pd(rng, 6);
    const EstimationResult r = estimate_cholesky_ml(s, config(Target::CholeskyML, Penalty::scad(0.15)));
    ASSERT_FALSE(r.inner_traces.empty());
    for (const auto& trace : r.inner_traces) {
      for (std::size_t k = 1; k < trace.size(); ++k) EXPECT_LE(trace[k], trace[k - 1] + 1e-10);
    }
  }
}

TEST(CholeskyLs, UnpenalizedIsMcd) {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 10; ++trial) {
    const SymMatrix s = random_pd(rng, 2 + trial % 8);
    EstimatorConfig cfg = config(Target::CholeskyLS, Penalty::l1(0.0));
    const EstimationResult r = estimate_cholesky_ls(s, cfg);
    EXPECT_LE((r.cholesky_t->mat() - mcd(s).t.mat()).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(CholeskyLs, IdentityAndSaturation) {
  const EstimationResult id = estimate_cholesky_ls(SymMatrix::identity(3), config(Target::CholeskyLS, Penalty::l1(0.1)));
  EXPECT_TRUE(id.cholesky_t->mat().isApprox(Eigen::MatrixXd::Identity(3, 3)));
  std::mt19937_64 rng(56);
  const SymMatrix s = random_pd(rng, 5);
  const EstimationResult sat = estimate_cholesky_ls(s, config(Target::CholeskyLS, Penalty::l1(1e3 * s.max_abs())));
  EXPECT_TRUE(sat.cholesky_t->mat().isApprox(Eigen::MatrixXd::Identity(5, 5)));
  EXPECT_TRUE(sat.support.empty());
}

TEST(CholeskyNl, ScaledIdentity) {
  const double c = 3.0;
  const EstimationResult r =
      estimate_cholesky_nl(SymMatrix(c * Eigen::MatrixXd::Identity(3, 3)), config(Target::CholeskyNL, Penalty::l1(0.2)));
  EXPECT_TRUE(r.cholesky_t->mat().isApprox(Eigen::MatrixXd::Identity(3, 3), 1e-12));
  EXPECT_TRUE(r.estimate.mat().isApprox(Eigen::MatrixXd::Identity(3, 3) / c, 1e-12));
}

TEST(CholeskyNl, UnpenalizedRecoversInverseCorrelation) {
  std::mt19937_64 rng(57);
  for (int trial = 0; trial < 10; ++trial) {
    const SymMatrix s = random_pd(rng, 2 + trial % 6);
    const EstimationResult r = estimate_cholesky_nl(s, config(Target::CholeskyNL, Penalty::l1(0.0)));
    const Eigen::MatrixXd t = r.cholesky_t->mat();
    const Eigen::MatrixXd gamma_inv = to_correlation(s).correlation.mat().inverse();
    EXPECT_LE((t.transpose() * t - gamma_inv).norm(), 1e-6 * gamma_inv.norm());
    EXPECT_LE((r.estimate.mat() - s.mat().inverse()).norm(), 1e-6 * s.mat().inverse().norm());
  }
}

TEST(Cholesky, SupportIsStrictlyLower) {
  std::mt19937_64 rng(58);
  const SymMatrix s = random_pd(rng, 6);
  for (Target t : {Target::CholeskyML, Target::CholeskyLS, Target::CholeskyNL}) {
    const EstimationResult r = estimate(s, config(t, Penalty::scad(0.1)));
    for (const auto& [i, j] : r.support) {
      EXPECT_LT(j, i);
      EXPECT_NE(r.cholesky_t->mat()(i, j), 0.0);
    }
    EXPECT_TRUE(is_positive_definite(r.estimate)) << target_name(t);
  }
}

TEST(Cholesky, ObjectivesAtKnownPoint) {
  const SymMatrix s = ar1(3, 0.5);
  const MCDPair m = mcd(s);
  // At the exact MCD, T S T^T = D so tr(T^T D^-1 T S) = p.
  EXPECT_NEAR(cholesky_ml_objective(s, m.t, m.d, Penalty::l1(0.0)), 3.0 + std::log(0.75 * 0.75), 1e-12);
  EXPECT_NEAR(cholesky_ls_objective(s, m.t, Penalty::l1(0.0)), 1.0 + 0.75 + 0.75, 1e-12);
  EXPECT_NEAR(cholesky_ls_objective(s, m.t, Penalty::l1(1.0)), 2.5 + 2.0 * 1.0, 1e-12);
}
