#pragma once

#include <Eigen/Dense>

// Data-parallel inner loops. Every kernel has a serial reference and an
// OpenMP variant; both sum in the same order, so results agree bit for bit
// regardless of thread count.

namespace sparsecov::kernels {

/// X^T X / divisor for an n x p table X.
Eigen::MatrixXd crossprod_serial(const Eigen::MatrixXd& x, double divisor);
Eigen::MatrixXd crossprod_omp(const Eigen::MatrixXd& x, double divisor);

/// Z * L^T for a lower-triangular L (rows of Z become L z).
Eigen::MatrixXd lower_transform_serial(const Eigen::MatrixXd& z, const Eigen::MatrixXd& lower);
Eigen::MatrixXd lower_transform_omp(const Eigen::MatrixXd& z, const Eigen::MatrixXd& lower);

/// Column means of X.
Eigen::VectorXd column_means_serial(const Eigen::MatrixXd& x);
Eigen::VectorXd column_means_omp(const Eigen::MatrixXd& x);

}  // namespace sparsecov::kernels
