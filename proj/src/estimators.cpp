#include "sparsecov/estimators.hpp"

#include <cmath>

#include "sparsecov/cholesky.hpp"

namespace sparsecov {

std::string target_name(Target target) {
  switch (target) {
    case Target::Precision:
      return "precision";
    case Target::Covariance:
      return "covariance";
    case Target::InverseCorrelation:
      return "inverse-correlation";
    case Target::Correlation:
      return "correlation";
    case Target::CholeskyML:
      return "cholesky-ml";
    case Target::CholeskyLS:
      return "cholesky-ls";
    case Target::CholeskyNL:
      return "cholesky-nl";
  }
  return "?";
}

Target parse_target(std::string_view name) {
  for (const Target t : {Target::Precision, Target::Covariance, Target::InverseCorrelation, Target::Correlation,
                         Target::CholeskyML, Target::CholeskyLS, Target::CholeskyNL}) {
    if (target_name(t) == name) return t;
  }
  throw InvalidInput("unknown target '" + std::string(name) + "'");
}

bool is_cholesky(Target target) {
  return target == Target::CholeskyML || target == Target::CholeskyLS || target == Target::CholeskyNL;
}

void EstimatorConfig::validate() const {
  if (lla_iters < 1) throw InvalidInput("lla_iters must be >= 1");
  solver.validate();
}

double support_tolerance(const Eigen::MatrixXd& m) { return kSupportTolRelative * m.cwiseAbs().maxCoeff(); }

std::vector<IndexPair> offdiag_support(const Eigen::MatrixXd& m) {
  const double tol = support_tolerance(m);
  std::vector<IndexPair> out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = i + 1; j < m.cols(); ++j) {
      if (std::abs(m(i, j)) > tol) out.emplace_back(i, j);
    }
  }
  return out;
}

double offdiag_penalty_value(const Penalty& pen, const Eigen::MatrixXd& x) {
  double acc = 0.0;
  for (Index j = 0; j < x.cols(); ++j) {
    for (Index i = 0; i < x.rows(); ++i) {
      if (i != j) acc += pen.value(x(i, j));
    }
  }
  return acc;
}

WeightMatrix lla_weights(const Penalty& pen, const SymMatrix& current) {
  const Index p = current.dim();
  Eigen::MatrixXd w(p, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) w(i, j) = (i == j) ? 0.0 : pen.derivative(std::abs(current(i, j)));
  }
  return WeightMatrix(w);
}

double precision_objective(const SymMatrix& s, const SymMatrix& omega, const Penalty& pen) {
  return s.mat().cwiseProduct(omega.mat()).sum() - log_det(omega) + offdiag_penalty_value(pen, omega.mat());
}

double covariance_objective(const SymMatrix& s, const SymMatrix& sigma, const Penalty& pen) {
  const SymMatrix inv = inverse(sigma);
  return s.mat().cwiseProduct(inv.mat()).sum() + log_det(sigma) + offdiag_penalty_value(pen, sigma.mat());
}

namespace {

void require_positive_diagonal(const SymMatrix& s) {
  for (Index i = 0; i < s.dim(); ++i) {
    if (!(s(i, i) > 0.0)) {
      throw DegenerateColumn("variable " + std::to_string(i) + " has non-positive variance");
    }
  }
}

void require_identifiable(const SymMatrix& s, const Penalty& pen) {
  if (pen.lambda() == 0.0 && !is_positive_definite(s)) {
    throw NotPositiveDefinite("singular sample covariance requires lambda > 0");
  }
}

void check_init(const EstimatorConfig& cfg, Index p) {
  if (cfg.init && cfg.init->dim() != p) throw DimensionMismatch("init has wrong dimension");
}

// LLA over the weighted graphical lasso; s may be a covariance or a correlation matrix.
EstimationResult lla_precision(const SymMatrix& s, const EstimatorConfig& cfg) {
  EstimationResult out;
  SymMatrix current = SymMatrix::zero(s.dim());
  std::optional<SymMatrix> start = cfg.init;
  std::optional<WeightMatrix> previous_weights;

  for (int k = 0; k < cfg.lla_iters; ++k) {
    WeightMatrix w = lla_weights(cfg.penalty, current);
    if (previous_weights && previous_weights->mat() == w.mat()) break;
    const GlassoResult fit = glasso_weighted(s, w, cfg.solver, start ? &*start : nullptr);
    out.converged = out.converged && fit.converged;
    out.sweeps_used += fit.sweeps;
    current = fit.omega;
    start = fit.omega;
    previous_weights = std::move(w);
    out.objective_trace.push_back(precision_objective(s, current, cfg.penalty));
  }
  out.estimate = current;
  return out;
}

// LLA over the proximal covariance solver, starting from a diagonal point.
EstimationResult lla_covariance(const SymMatrix& s, const SymMatrix& default_start, const EstimatorConfig& cfg,
                                bool pin_diagonal) {
  EstimationResult out;
  SymMatrix current = SymMatrix::diagonal(default_start.diag());
  SymMatrix start = cfg.init ? *cfg.init : default_start;
  if (pin_diagonal) {
    Eigen::MatrixXd m = start.mat();
    m.diagonal().setOnes();
    start = SymMatrix(m);
  }
  std::optional<WeightMatrix> previous_weights;

  for (int k = 0; k < cfg.lla_iters; ++k) {
    WeightMatrix w = lla_weights(cfg.penalty, current);
    if (previous_weights && previous_weights->mat() == w.mat()) break;
    const ProxResult fit = prox_covariance_weighted(s, w, start, cfg.solver, pin_diagonal);
    out.converged = out.converged && fit.converged;
    out.sweeps_used += fit.iterations;
    current = fit.sigma;
    start = fit.sigma;
    previous_weights = std::move(w);
    out.objective_trace.push_back(covariance_objective(s, current, cfg.penalty));
  }
  out.estimate = current;
  return out;
}

}  // namespace

EstimationResult estimate_precision(const SymMatrix& s, const EstimatorConfig& cfg) {
  cfg.validate();
  require_positive_diagonal(s);
  require_identifiable(s, cfg.penalty);
  check_init(cfg, s.dim());
  EstimationResult out = lla_precision(s, cfg);
  out.target = Target::Precision;
  out.support = offdiag_support(out.estimate.mat());
  return out;
}

EstimationResult estimate_covariance(const SymMatrix& s, const EstimatorConfig& cfg) {
  cfg.validate();
  require_positive_diagonal(s);
  require_identifiable(s, cfg.penalty);
  check_init(cfg, s.dim());
  EstimationResult out = lla_covariance(s, SymMatrix::diagonal(s.diag()), cfg, false);
  out.target = Target::Covariance;
  out.support = offdiag_support(out.estimate.mat());
  return out;
}

EstimationResult estimate_inverse_correlation(const SymMatrix& s, const EstimatorConfig& cfg) {
  cfg.validate();
  check_init(cfg, s.dim());
  const CorrelationScaling scaled = to_correlation(s);
  require_identifiable(scaled.correlation, cfg.penalty);
  EstimationResult out = lla_precision(scaled.correlation, cfg);
  out.target = Target::InverseCorrelation;
  out.support = offdiag_support(out.estimate.mat());
  out.companion = scale_both_sides(out.estimate, scaled.scale.values().cwiseInverse());
  return out;
}

EstimationResult estimate_correlation(const SymMatrix& s, const EstimatorConfig& cfg) {
  cfg.validate();
  check_init(cfg, s.dim());
  const CorrelationScaling scaled = to_correlation(s);
  require_identifiable(scaled.correlation, cfg.penalty);
  EstimationResult out = lla_covariance(scaled.correlation, SymMatrix::identity(s.dim()), cfg, true);
  out.target = Target::Correlation;
  out.support = offdiag_support(out.estimate.mat());
  out.companion = scale_both_sides(out.estimate, scaled.scale.values());
  return out;
}

EstimationResult estimate(const SymMatrix& s, const EstimatorConfig& cfg) {
  switch (cfg.target) {
    case Target::Precision:
      return estimate_precision(s, cfg);
    case Target::Covariance:
      return estimate_covariance(s, cfg);
    case Target::InverseCorrelation:
      return estimate_inverse_correlation(s, cfg);
    case Target::Correlation:
      return estimate_correlation(s, cfg);
    case Target::CholeskyML:
      return estimate_cholesky_ml(s, cfg);
    case Target::CholeskyLS:
      return estimate_cholesky_ls(s, cfg);
    case Target::CholeskyNL:
      return estimate_cholesky_nl(s, cfg);
  }
  throw InvalidInput("unknown target");
}

SymMatrix implied_precision(const EstimationResult& result) {
  switch (result.target) {
    case Target::Precision:
    case Target::CholeskyML:
    case Target::CholeskyLS:
    case Target::CholeskyNL:
      return result.estimate;
    case Target::InverseCorrelation:
      return *result.companion;
    case Target::Covariance:
      return inverse(result.estimate);
    case Target::Correlation:
      return inverse(*result.companion);
  }
  throw InvalidInput("unknown target");
}

double target_objective(Target target, const SymMatrix& s, const SymMatrix& point, const Penalty& pen) {
  switch (target) {
    case Target::Precision:
      return precision_objective(s, point, pen);
    case Target::Covariance:
      return covariance_objective(s, point, pen);
    case Target::InverseCorrelation:
      return precision_objective(to_correlation(s).correlation, point, pen);
    case Target::Correlation:
      return covariance_objective(to_correlation(s).correlation, point, pen);
    default:
      throw InvalidInput("target_objective: Cholesky targets are parameterized by T, not a symmetric matrix");
  }
}

}  // namespace sparsecov
