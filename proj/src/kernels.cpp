#include "sparsecov/kernels.hpp"

namespace sparsecov::kernels {
namespace {

// Entry (i, j) of X^T X; fixed summation order over rows.
inline double column_dot(const Eigen::MatrixXd& x, Eigen::Index i, Eigen::Index j) {
  const double* a = x.col(i).data();
  const double* b = x.col(j).data();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < x.rows(); ++k) acc += a[k] * b[k];
  return acc;
}

inline double lower_row_dot(const Eigen::MatrixXd& z, const Eigen::MatrixXd& lower,
                            Eigen::Index r, Eigen::Index i) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k <= i; ++k) acc += lower(i, k) * z(r, k);
  return acc;
}

}  // namespace

Eigen::MatrixXd crossprod_serial(const Eigen::MatrixXd& x, double divisor) {
  const Eigen::Index p = x.cols();
  Eigen::MatrixXd out(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double v = column_dot(x, i, j) / divisor;
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

Eigen::MatrixXd crossprod_omp(const Eigen::MatrixXd& x, double divisor) {
  const Eigen::Index p = x.cols();
  Eigen::MatrixXd out(p, p);
#pragma omp parallel for schedule(dynamic, 4)
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double v = column_dot(x, i, j) / divisor;
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

Eigen::MatrixXd lower_transform_serial(const Eigen::MatrixXd& z, const Eigen::MatrixXd& lower) {
  Eigen::MatrixXd out(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.cols(); ++i) {
    for (Eigen::Index r = 0; r < z.rows(); ++r) out(r, i) = lower_row_dot(z, lower, r, i);
  }
  return out;
}

Eigen::MatrixXd lower_transform_omp(const Eigen::MatrixXd& z, const Eigen::MatrixXd& lower) {
  Eigen::MatrixXd out(z.rows(), z.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < z.cols(); ++i) {
    for (Eigen::Index r = 0; r < z.rows(); ++r) out(r, i) = lower_row_dot(z, lower, r, i);
  }
  return out;
}

Eigen::VectorXd column_means_serial(const Eigen::MatrixXd& x) {
  Eigen::VectorXd mu(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < x.rows(); ++k) acc += x(k, j);
    mu(j) = acc / static_cast<double>(x.rows());
  }
  return mu;
}

Eigen::VectorXd column_means_omp(const Eigen::MatrixXd& x) {
  Eigen::VectorXd mu(x.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < x.rows(); ++k) acc += x(k, j);
    mu(j) = acc / static_cast<double>(x.rows());
  }
  return mu;
}

}  // namespace sparsecov::kernels
