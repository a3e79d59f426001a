#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sparsecov/matrix.hpp"
#include "sparsecov/penalty.hpp"
#include "sparsecov/solvers.hpp"

namespace sparsecov {

enum class Target {
  Precision,
  Covariance,
  InverseCorrelation,
  Correlation,
  CholeskyML,
  CholeskyLS,
  CholeskyNL,
};

std::string target_name(Target target);
Target parse_target(std::string_view name);
bool is_cholesky(Target target);

struct EstimatorConfig {
  Target target = Target::Precision;
  Penalty penalty = Penalty::l1(0.1);
  int lla_iters = 3;
  SolverOptions solver;
  // Starting iterate for the inner solver (warm start). The first LLA
  // reweighting still starts from a zero off-diagonal. Ignored by the
  // Cholesky targets.
  std::optional<SymMatrix> init;

  void validate() const;
};

using IndexPair = std::pair<Index, Index>;

struct EstimationResult {
  Target target = Target::Precision;
  SymMatrix estimate;                  // target-scale matrix; precision for Cholesky targets
  std::optional<SymMatrix> companion;  // Omega = W^-1 Psi W^-1 or Sigma = W Gamma W
  std::vector<IndexPair> support;      // (i, j), i < j; (row, col) of T for Cholesky targets
  std::vector<double> objective_trace; // true-penalty objective after each LLA step
  bool converged = true;
  int sweeps_used = 0;

  std::optional<LowerTriangular> cholesky_t;
  std::optional<DiagMatrix> cholesky_d;
  // ML only: surrogate objective after every T and D half-step, one list per LLA step.
  std::vector<std::vector<double>> inner_traces;
};

/// Entries below this fraction of the largest magnitude count as zero.
inline constexpr double kSupportTolRelative = 1e-8;

double support_tolerance(const Eigen::MatrixXd& m);
std::vector<IndexPair> offdiag_support(const Eigen::MatrixXd& m);

/// sum_{i != j} p(|x_ij|).
double offdiag_penalty_value(const Penalty& pen, const Eigen::MatrixXd& x);

/// Local linear approximation weights: w_ij = p'(|current_ij|), w_ii = 0.
WeightMatrix lla_weights(const Penalty& pen, const SymMatrix& current);

/// tr(S Omega) - log|Omega| + sum_{i != j} p(|omega_ij|).
double precision_objective(const SymMatrix& s, const SymMatrix& omega, const Penalty& pen);

/// tr(S Sigma^-1) + log|Sigma| + sum_{i != j} p(|sigma_ij|).
double covariance_objective(const SymMatrix& s, const SymMatrix& sigma, const Penalty& pen);

EstimationResult estimate_precision(const SymMatrix& s, const EstimatorConfig& cfg);
EstimationResult estimate_covariance(const SymMatrix& s, const EstimatorConfig& cfg);

/// Precision-type estimate on the correlation scale. estimate = Psi, companion
/// = W^-1 Psi W^-1 with W = diag(S)^{1/2}.
EstimationResult estimate_inverse_correlation(const SymMatrix& s, const EstimatorConfig& cfg);

/// Covariance-type estimate on the correlation scale with the diagonal held
/// at exactly one. companion = W Gamma W.
EstimationResult estimate_correlation(const SymMatrix& s, const EstimatorConfig& cfg);

/// Dispatches on cfg.target, including the Cholesky targets.
EstimationResult estimate(const SymMatrix& s, const EstimatorConfig& cfg);

/// Precision matrix implied by a result, used for likelihood-based scoring.
SymMatrix implied_precision(const EstimationResult& result);

/// Same objective the result's trace reports, evaluated at an arbitrary
/// point of the target's parameter space (a symmetric matrix for the
/// non-Cholesky targets).
double target_objective(Target target, const SymMatrix& s, const SymMatrix& point, const Penalty& pen);

}  // namespace sparsecov
