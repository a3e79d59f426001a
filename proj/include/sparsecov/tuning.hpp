#pragma once

#include <vector>

#include "sparsecov/estimators.hpp"

namespace sparsecov {

/// Strictly increasing positive regularization values.
class LambdaGrid {
 public:
  explicit LambdaGrid(std::vector<double> values);

  /// k values evenly spaced in log between lo and hi (inclusive).
  static LambdaGrid log_spaced(double lo, double hi, int k);

  /// 20 values c * sqrt(log p / n) with c log-spaced over [0.1, 10].
  static LambdaGrid default_for(Index p, Index n);

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
};

/// n (tr(S Omega) - log|Omega|) + log(n) df with df = p + number of nonzero
/// strictly upper entries of Omega.
double bic_score(const SymMatrix& s, const SymMatrix& omega, Index n);

/// Same score with the likelihood from implied_precision(result) and the
/// degrees of freedom p + |result.support|.
double model_bic(const SymMatrix& s, const EstimationResult& result, Index n);

struct SelectionRow {
  double lambda = 0.0;
  double bic = 0.0;
  std::size_t support_size = 0;
  double objective = 0.0;
  bool converged = true;
};

struct Selection {
  double best_lambda = 0.0;
  std::vector<SelectionRow> table;  // sorted by increasing lambda
  EstimationResult best;
};

/// Fits the template configuration at every grid value (largest first,
/// warm-starting each fit from the previous solution) and returns the BIC
/// minimizer. BIC values within 1e-9 (relative) of each other tie and the
/// larger lambda wins.
Selection select_lambda(const SymMatrix& s, Index n, const LambdaGrid& grid, const EstimatorConfig& tmpl);

}  // namespace sparsecov
