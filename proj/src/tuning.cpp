#include "sparsecov/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sparsecov {

LambdaGrid::LambdaGrid(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvalidInput("lambda grid is empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0) || !std::isfinite(values_[i])) throw InvalidInput("lambda grid values must be > 0");
    if (i > 0 && !(values_[i] > values_[i - 1])) throw InvalidInput("lambda grid must be strictly increasing");
  }
}

LambdaGrid LambdaGrid::log_spaced(double lo, double hi, int k) {
  if (k < 1 || !(lo > 0.0) || !(hi >= lo)) throw InvalidInput("bad grid spec");
  if (k == 1 || lo == hi) return LambdaGrid({lo});
  std::vector<double> v(static_cast<std::size_t>(k));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < k; ++i) v[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (k - 1));
  v.front() = lo;
  v.back() = hi;
  return LambdaGrid(std::move(v));
}

LambdaGrid LambdaGrid::default_for(Index p, Index n) {
  const double unit = std::sqrt(std::log(static_cast<double>(std::max<Index>(p, 2))) / static_cast<double>(n));
  return log_spaced(0.1 * unit, 10.0 * unit, 20);
}

namespace {

double gaussian_loss(const SymMatrix& s, const SymMatrix& omega) {
  return s.mat().cwiseProduct(omega.mat()).sum() - log_det(omega);
}

}  // namespace

double bic_score(const SymMatrix& s, const SymMatrix& omega, Index n) {
  if (s.dim() != omega.dim()) throw DimensionMismatch("bic_score: dimension mismatch");
  const auto df = static_cast<double>(omega.dim() + static_cast<Index>(offdiag_support(omega.mat()).size()));
  const double nn = static_cast<double>(n);
  return nn * gaussian_loss(s, omega) + std::log(nn) * df;
}

double model_bic(const SymMatrix& s, const EstimationResult& result, Index n) {
  const SymMatrix omega = implied_precision(result);
  const auto df = static_cast<double>(s.dim() + static_cast<Index>(result.support.size()));
  const double nn = static_cast<double>(n);
  return nn * gaussian_loss(s, omega) + std::log(nn) * df;
}

Selection select_lambda(const SymMatrix& s, Index n, const LambdaGrid& grid, const EstimatorConfig& tmpl) {
  if (n < 2) throw InvalidInput("select_lambda needs n >= 2");
  const auto& lambdas = grid.values();
  const std::size_t k = lambdas.size();

  std::vector<SelectionRow> rows(k);
  std::vector<EstimationResult> fits(k);
  std::optional<SymMatrix> warm;
  for (std::size_t r = k; r-- > 0;) {
    EstimatorConfig cfg = tmpl;
    cfg.penalty = tmpl.penalty.with_lambda(lambdas[r]);
    if (warm) cfg.init = warm;
    EstimationResult fit = estimate(s, cfg);
    if (!is_cholesky(cfg.target)) warm = fit.estimate;

    SelectionRow& row = rows[r];
    row.lambda = lambdas[r];
    row.bic = model_bic(s, fit, n);
    row.support_size = fit.support.size();
    row.objective = fit.objective_trace.empty() ? 0.0 : fit.objective_trace.back();
    row.converged = fit.converged;
    fits[r] = std::move(fit);
  }

  // Scan from the largest lambda so ties resolve toward sparser models.
  std::size_t best = k - 1;
  for (std::size_t r = k - 1; r-- > 0;) {
    const double tie = 1e-9 * std::max(1.0, std::abs(rows[best].bic));
    if (rows[r].bic < rows[best].bic - tie) best = r;
  }
  return {lambdas[best], std::move(rows), std::move(fits[best])};
}

}  // namespace sparsecov
