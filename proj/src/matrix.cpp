#include "sparsecov/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>

#include "sparsecov/kernels.hpp"

namespace sparsecov {

namespace {
constexpr double kPdFloorRelative = 1e-12;
constexpr double kAsymmetryWarn = 1e-8;
constexpr double kOpNormTol = 1e-10;
constexpr Index kOpNormMinIterations = 100;
constexpr Index kOpNormSquareEvery = 8;
}  // namespace

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw DimensionMismatch("SymMatrix requires a non-empty square matrix, got " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (scale > 0.0 && asym > kAsymmetryWarn * scale) {
    std::clog << "warning: symmetrizing input with relative asymmetry " << asym / scale << "\n";
  }
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(Index p) { return SymMatrix(Eigen::MatrixXd::Identity(p, p)); }

SymMatrix SymMatrix::zero(Index p) { return SymMatrix(Eigen::MatrixXd::Zero(p, p)); }

SymMatrix SymMatrix::diagonal(const Eigen::VectorXd& d) {
  return SymMatrix(Eigen::MatrixXd(d.asDiagonal()));
}

LowerTriangular::LowerTriangular(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw DimensionMismatch("LowerTriangular requires a non-empty square matrix");
  }
  m_ = m.triangularView<Eigen::Lower>();
}

LowerTriangular LowerTriangular::identity(Index p) {
  return LowerTriangular(Eigen::MatrixXd::Identity(p, p));
}

void LowerTriangular::set(Index i, Index j, double v) {
  if (j > i) throw InvalidInput("LowerTriangular::set on the strictly upper part");
  m_(i, j) = v;
}

DiagMatrix::DiagMatrix(Eigen::VectorXd d) : d_(std::move(d)) {
  if (!d_.allFinite()) throw InvalidInput("DiagMatrix entries must be finite");
}

LowerTriangular cholesky_factor(const SymMatrix& a) {
  const Index p = a.dim();
  const Eigen::MatrixXd& m = a.mat();
  const double max_diag = m.diagonal().maxCoeff();
  if (!(max_diag > 0.0) || !m.allFinite()) {
    throw NotPositiveDefinite("matrix has no positive diagonal entry");
  }
  const double floor = kPdFloorRelative * max_diag;

  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(p, p);
  for (Index j = 0; j < p; ++j) {
    double pivot = m(j, j) - l.row(j).head(j).squaredNorm();
    if (!(pivot > floor)) {
      throw NotPositiveDefinite("Cholesky pivot " + std::to_string(j) + " is " +
                                std::to_string(pivot));
    }
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (Index i = j + 1; i < p; ++i) {
      l(i, j) = (m(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / ljj;
    }
  }
  return LowerTriangular(l);
}

bool is_positive_definite(const SymMatrix& a) {
  try {
    cholesky_factor(a);
    return true;
  } catch (const NotPositiveDefinite&) {
    return false;
  }
}

double log_det(const SymMatrix& a) {
  const LowerTriangular l = cholesky_factor(a);
  return 2.0 * l.mat().diagonal().array().log().sum();
}

SymMatrix inverse(const SymMatrix& a) {
  const LowerTriangular l = cholesky_factor(a);
  const auto lview = l.mat().triangularView<Eigen::Lower>();
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(a.dim(), a.dim());
  lview.solveInPlace(x);
  // L^-T L^-1 is symmetric up to rounding even when A is ill-conditioned.
  return SymMatrix(x.transpose() * x);
}

double operator_norm(const Eigen::MatrixXd& a) {
  if (!a.allFinite()) throw InvalidInput("operator_norm: non-finite entries");
  const Index cols = a.cols();
  if (cols == 0 || a.rows() == 0) return 0.0;
  if (a.cwiseAbs().maxCoeff() == 0.0) return 0.0;

  // Deterministic start vector with no special alignment.
  Eigen::VectorXd v(cols);
  for (Index i = 0; i < cols; ++i) v(i) = 1.0 + 0.5 * std::sin(1.0 + static_cast<double>(i));
  v.normalize();

  // Power iteration on A^T A. Every few steps the working matrix is squared,
  // which leaves the top eigenvector unchanged and squares the ratio of the
  // leading eigenvalues when they are close.
  const Eigen::MatrixXd gram = a.transpose() * a;
  Eigen::MatrixXd work = gram;
  const Index cap = std::max<Index>(10 * cols, kOpNormMinIterations);
  double rho = 0.0;
  for (Index it = 0; it < cap; ++it) {
    const Eigen::VectorXd w = work * v;
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    const double next = v.dot(gram * v);  // Rayleigh quotient of A^T A
    if (it > 0 && std::abs(next - rho) <= kOpNormTol * std::abs(next)) {
      return std::sqrt(std::max(next, 0.0));
    }
    rho = next;
    if (it % kOpNormSquareEvery == kOpNormSquareEvery - 1) {
      const Eigen::MatrixXd sq = work * work;
      work = (0.5 / sq.cwiseAbs().maxCoeff()) * (sq + sq.transpose());
    }
  }
  throw NonConvergence("operator_norm: power iteration did not converge in " +
                       std::to_string(cap) + " iterations");
}

double frobenius_norm(const Eigen::MatrixXd& a) { return a.norm(); }

SymMatrix sample_covariance(const Eigen::MatrixXd& data, bool center) {
  if (data.rows() < 2) throw InvalidInput("sample_covariance needs at least 2 observations");
  if (data.cols() < 1) throw InvalidInput("sample_covariance needs at least 1 variable");
  if (!data.allFinite()) throw InvalidInput("sample_covariance: non-finite values in data");

  const double n = static_cast<double>(data.rows());
  if (!center) return SymMatrix(kernels::crossprod_omp(data, n));
  const Eigen::VectorXd mu = kernels::column_means_omp(data);
  const Eigen::MatrixXd centered = data.rowwise() - mu.transpose();
  return SymMatrix(kernels::crossprod_omp(centered, n));
}

CorrelationScaling to_correlation(const SymMatrix& s) {
  const Index p = s.dim();
  Eigen::VectorXd w(p);
  for (Index i = 0; i < p; ++i) {
    if (!(s(i, i) > 0.0)) {
      throw DegenerateColumn("variable " + std::to_string(i) + " has non-positive variance");
    }
    w(i) = std::sqrt(s(i, i));
  }
  Eigen::MatrixXd g(p, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) g(i, j) = (i == j) ? 1.0 : s(i, j) / (w(i) * w(j));
  }
  return {SymMatrix(g), DiagMatrix(w)};
}

SymMatrix scale_both_sides(const SymMatrix& a, const Eigen::VectorXd& d) {
  if (d.size() != a.dim()) throw DimensionMismatch("scale_both_sides: size mismatch");
  return SymMatrix(d.asDiagonal() * a.mat() * d.asDiagonal());
}

}  // namespace sparsecov
