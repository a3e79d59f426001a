#pragma once

#include "sparsecov/estimators.hpp"
#include "sparsecov/matrix.hpp"
#include "sparsecov/penalty.hpp"

namespace sparsecov {

/// Modified Cholesky decomposition T Sigma T^T = D. T is unit lower
/// triangular; row i holds minus the coefficients of the regression of
/// variable i on variables 0..i-1, and D_ii is that regression's residual
/// variance.
struct MCDPair {
  LowerTriangular t;
  DiagMatrix d;
};

MCDPair mcd(const SymMatrix& sigma);

/// Penalized objectives. The penalty covers the strictly lower entries of T
/// and is counted twice, matching the symmetric off-diagonal sums elsewhere.
///   ML: tr(T^T D^-1 T S) + log|D| + 2 sum_{j<i} p(|t_ij|)
///   LS: tr(T^T T S) + 2 sum_{j<i} p(|t_ij|)
///   NL: tr(T^T T G) - 2 log|T| + 2 sum_{j<i} p(|t_ij|),  G the sample correlation
double cholesky_ml_objective(const SymMatrix& s, const LowerTriangular& t, const DiagMatrix& d, const Penalty& pen);
double cholesky_ls_objective(const SymMatrix& s, const LowerTriangular& t, const Penalty& pen);
double cholesky_nl_objective(const SymMatrix& corr, const LowerTriangular& t, const Penalty& pen);

/// Positive root of g t^2 + c t - 1 = 0, the minimizer over t > 0 of
/// g t^2 + 2 c t - 2 log t.
double nl_diagonal_root(double g, double c);

/// Block alternation between D (closed form) and the rows of T (weighted
/// lasso regressions), inside the LLA loop. estimate = T^T D^-1 T.
EstimationResult estimate_cholesky_ml(const SymMatrix& s, const EstimatorConfig& cfg);

/// Independent penalized regressions per row; estimate = T^T D^-1 T with D
/// the residual variances diag(T S T^T).
EstimationResult estimate_cholesky_ls(const SymMatrix& s, const EstimatorConfig& cfg);

/// Rows solved on the sample correlation with a free positive diagonal;
/// estimate = W^-1 T^T T W^-1.
EstimationResult estimate_cholesky_nl(const SymMatrix& s, const EstimatorConfig& cfg);

}  // namespace sparsecov
