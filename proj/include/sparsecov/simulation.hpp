#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "sparsecov/estimators.hpp"
#include "sparsecov/matrix.hpp"

namespace sparsecov {

enum class TruthKind {
  TridiagonalPrecision,   // Omega_0: unit diagonal, constant first off-diagonal
  SparseRandomPrecision,  // Omega_0: random +-magnitude entries with given density
  AR1Covariance,          // Sigma_0(i, j) = phi^|i - j|; Omega_0 is tridiagonal
  TridiagonalCovariance,  // Sigma_0: unit diagonal, constant first off-diagonal
};

struct TruthSpec {
  TruthKind kind = TruthKind::TridiagonalPrecision;
  Index p = 10;
  double value = 0.0;    // off-diagonal value, magnitude (sparse) or phi (AR1)
  double density = 0.0;  // SparseRandomPrecision only
  std::uint64_t seed = 0;
};

/// "tridiag:0.4", "sparse:DENSITY:MAGNITUDE", "ar1:PHI", "tridiag-cov:0.3".
TruthSpec parse_truth(std::string_view spec, Index p, std::uint64_t seed);
std::string to_string(const TruthSpec& spec);

struct Truth {
  SymMatrix sigma;
  SymMatrix omega;
  std::vector<IndexPair> precision_support;   // nonzero off-diagonal pairs of Omega_0, i < j
  std::vector<IndexPair> covariance_support;  // nonzero off-diagonal pairs of Sigma_0, i < j
  double tau_min = 0.0;                       // smallest eigenvalue of Sigma_0
  double tau_max = 0.0;                       // largest eigenvalue of Sigma_0
};

Truth gen_truth(const TruthSpec& spec);

/// Truth on the scale a target estimates, and the support its sparsity refers to.
struct TargetTruth {
  SymMatrix matrix;
  std::vector<IndexPair> support;
};
TargetTruth truth_for_target(const Truth& truth, Target target);

/// splitmix64-style mixing of a seed with a list of keys.
std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

/// n rows y = L z with L L^T = sigma and z standard normal from a seeded
/// 64-bit Mersenne twister. Identical seeds give identical tables.
Eigen::MatrixXd sample_gaussian(const SymMatrix& sigma, Index n, std::uint64_t seed);

struct SupportRates {
  double true_zero = 1.0;     // truth-zero pairs estimated as zero
  double true_nonzero = 1.0;  // truth-nonzero pairs estimated as nonzero
};

/// Rates over off-diagonal pairs; an empty class scores 1.
SupportRates support_metrics(const std::vector<IndexPair>& truth_support, const SymMatrix& estimate,
                             double support_tol);

struct ErrorMetrics {
  double sq_frobenius = 0.0;
  double sq_operator = 0.0;
};

ErrorMetrics error_metrics(const SymMatrix& truth, const SymMatrix& estimate);

enum class LambdaRule { OracleScale, Bic };

struct RateExperiment {
  TruthSpec truth;  // p is replaced by each cell's p
  std::vector<Index> n_values;
  std::vector<Index> p_values;
  int replicates = 1;
  EstimatorConfig estimator;
  LambdaRule lambda_rule = LambdaRule::OracleScale;
  double lambda_scale = 1.0;        // lambda = lambda_scale * sqrt(log p / n)
  std::vector<double> grid_scales;  // BIC grid in the same units; empty = 20 values over [0.1, 10]
  std::uint64_t seed = 0;
  // Replaces the estimator; receives the sample covariance and the truth.
  std::function<SymMatrix(const SymMatrix&, const Truth&)> estimator_override;

  void validate() const;
};

struct RateCell {
  Index n = 0;
  Index p = 0;
  Index s = 0;  // nonzero off-diagonal entries of the target truth (both triangles)
  double mean_sq_frobenius = 0.0;
  double sd_sq_frobenius = 0.0;
  double mean_sq_operator = 0.0;
  double sd_sq_operator = 0.0;
  double true_zero_rate = 0.0;
  double true_nonzero_rate = 0.0;
  double mean_lambda = 0.0;
  int completed = 0;
  int failures = 0;
};

struct RateReport {
  std::vector<RateCell> cells;  // p-major, then n, in the order given
  // Least-squares slope of log mean squared Frobenius error against
  // log((p + s) log p / n), and against log n.
  double slope_rate = 0.0;
  double slope_rate_se = 0.0;
  double slope_n = 0.0;
  double slope_n_se = 0.0;
};

/// One replicate's outcome, before aggregation.
struct ReplicateOutcome {
  bool ok = false;
  double sq_frobenius = 0.0;
  double sq_operator = 0.0;
  double true_zero = 0.0;
  double true_nonzero = 0.0;
  double lambda = 0.0;
};

ReplicateOutcome run_replicate(const RateExperiment& exp, const Truth& truth, Index n, int replicate);

/// Replicates of all cells run as one OpenMP loop; results land in fixed
/// slots and are reduced in cell/replicate order, so the report does not
/// depend on the thread count.
RateReport run_rate_experiment(const RateExperiment& exp);

/// Single-threaded reference of run_rate_experiment.
RateReport run_rate_experiment_serial(const RateExperiment& exp);

/// Slope and standard error of an ordinary least-squares line fit.
struct LineFit {
  double slope = 0.0;
  double slope_se = 0.0;
  double intercept = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sparsecov
