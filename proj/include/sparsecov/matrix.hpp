#pragma once

#include <Eigen/Dense>

#include <utility>

#include "sparsecov/errors.hpp"

namespace sparsecov {

using Index = Eigen::Index;

/// Dense symmetric p x p matrix. Construction symmetrizes the input by
/// averaging with its transpose, so entries(i, j) == entries(j, i) bit for bit.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Eigen::MatrixXd& m);

  static SymMatrix identity(Index p);
  static SymMatrix zero(Index p);
  static SymMatrix diagonal(const Eigen::VectorXd& d);

  Index dim() const { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }
  const Eigen::MatrixXd& mat() const { return m_; }
  Eigen::VectorXd diag() const { return m_.diagonal(); }

  // Writes both (i, j) and (j, i).
  void set(Index i, Index j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }

  double max_abs() const { return m_.cwiseAbs().maxCoeff(); }

 private:
  Eigen::MatrixXd m_;
};

/// Lower-triangular matrix; the strictly upper part is always zero.
class LowerTriangular {
 public:
  LowerTriangular() = default;
  explicit LowerTriangular(const Eigen::MatrixXd& m);

  static LowerTriangular identity(Index p);

  Index dim() const { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }
  const Eigen::MatrixXd& mat() const { return m_; }

  // Only lower entries (j <= i) are writable.
  void set(Index i, Index j, double v);

 private:
  Eigen::MatrixXd m_;
};

/// Diagonal matrix stored as its diagonal vector.
class DiagMatrix {
 public:
  DiagMatrix() = default;
  explicit DiagMatrix(Eigen::VectorXd d);

  Index dim() const { return d_.size(); }
  double operator()(Index i) const { return d_(i); }
  const Eigen::VectorXd& values() const { return d_; }
  Eigen::MatrixXd dense() const { return d_.asDiagonal(); }

 private:
  Eigen::VectorXd d_;
};

/// Cholesky factor L with L * L^T = A. Pivots at or below 1e-12 times the
/// largest diagonal entry are reported as NotPositiveDefinite.
LowerTriangular cholesky_factor(const SymMatrix& a);

/// True iff cholesky_factor(a) succeeds.
bool is_positive_definite(const SymMatrix& a);

/// log|A| = 2 * sum_i ln L_ii.
double log_det(const SymMatrix& a);

/// Inverse through the Cholesky factor.
SymMatrix inverse(const SymMatrix& a);

/// Largest singular value by power iteration on A^T A
/// (relative tolerance 1e-10, at most 10 * cols iterations).
double operator_norm(const Eigen::MatrixXd& a);

double frobenius_norm(const Eigen::MatrixXd& a);

/// S = n^-1 sum_i y_i y_i^T, optionally after subtracting column means.
/// Zero-variance columns are allowed here; to_correlation rejects them.
SymMatrix sample_covariance(const Eigen::MatrixXd& data, bool center);

struct CorrelationScaling {
  SymMatrix correlation;  // W^-1 S W^-1, unit diagonal exactly
  DiagMatrix scale;       // W_ii = sqrt(S_ii)
};

CorrelationScaling to_correlation(const SymMatrix& s);

/// D * A * D for a diagonal D.
SymMatrix scale_both_sides(const SymMatrix& a, const Eigen::VectorXd& d);

}  // namespace sparsecov
