#pragma once

#include <Eigen/Dense>

#include <vector>

#include "sparsecov/matrix.hpp"

namespace sparsecov {

/// Symmetric nonnegative off-diagonal weights; the diagonal is always zero
/// (diagonal entries are never penalized).
class WeightMatrix {
 public:
  WeightMatrix() = default;
  explicit WeightMatrix(const Eigen::MatrixXd& w);

  static WeightMatrix uniform(Index p, double w);
  static WeightMatrix zero(Index p) { return uniform(p, 0.0); }

  Index dim() const { return w_.rows(); }
  double operator()(Index i, Index j) const { return w_(i, j); }
  const Eigen::MatrixXd& mat() const { return w_; }

  bool all_offdiag_zero() const;

 private:
  Eigen::MatrixXd w_;
};

struct SolverOptions {
  double tol = 1e-6;
  int max_sweeps = 500;
  double pd_backtrack = 0.5;

  void validate() const;
};

/// sign(z) * max(|z| - t, 0).
inline double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

struct LassoResult {
  Eigen::VectorXd beta;
  int sweeps = 0;
  bool converged = false;
};

/// Cyclic coordinate descent on 1/2 b^T G b - r^T b + sum_j w_j |b_j|.
/// Each update is soft_threshold(r_j - sum_{k != j} G_jk b_k, w_j) / G_jj.
/// Stops when the largest coordinate move in a sweep is at most tol * max |b|.
LassoResult lasso_weighted(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs,
                           const Eigen::VectorXd& weights, const SolverOptions& opts,
                           const Eigen::VectorXd* start = nullptr);

/// tr(S Omega) - log|Omega| + sum_{i != j} w_ij |omega_ij|.
double glasso_objective(const SymMatrix& s, const SymMatrix& omega, const WeightMatrix& w);

/// tr(S Sigma^-1) + log|Sigma| + sum_{i != j} w_ij |sigma_ij|.
double covariance_objective(const SymMatrix& s, const SymMatrix& sigma, const WeightMatrix& w);

struct GlassoResult {
  SymMatrix omega;
  SymMatrix sigma;  // omega^-1
  int sweeps = 0;
  bool converged = false;
};

/// Weighted graphical lasso by block coordinate descent over columns on the
/// primal precision matrix. For column j, with Omega_11 held fixed, the exact
/// block minimizer is
///
///   omega_12 = argmin 1/2 b^T (s_jj Omega_11^-1) b + s_12^T b + sum w |b|,
///   omega_jj = 1 / s_jj + omega_12^T Omega_11^-1 omega_12,
///
/// where Omega_11^-1 comes from the running Sigma = Omega^-1. Every block step
/// lowers the objective and keeps Omega positive definite.
///
/// Throws NotPositiveDefinite when S is singular and no off-diagonal entry
/// is penalized.
GlassoResult glasso_weighted(const SymMatrix& s, const WeightMatrix& w, const SolverOptions& opts,
                             const SymMatrix* start = nullptr);

struct ProxResult {
  SymMatrix sigma;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;  // accepted iterates, starting at init
};

/// Proximal gradient for the weighted-L1 covariance objective. The gradient
/// step uses Sigma^-1 - Sigma^-1 S Sigma^-1, the prox soft-thresholds the
/// off-diagonals, and trial steps shrink by pd_backtrack until the iterate is
/// positive definite and passes a sufficient-decrease test. With
/// pin_diagonal the diagonal of init is held fixed (correlation scale).
ProxResult prox_covariance_weighted(const SymMatrix& s, const WeightMatrix& w, const SymMatrix& init,
                                    const SolverOptions& opts, bool pin_diagonal = false);

}  // namespace sparsecov
