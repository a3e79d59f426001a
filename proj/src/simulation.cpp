#include "sparsecov/simulation.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "sparsecov/kernels.hpp"
#include "sparsecov/tuning.hpp"

namespace sparsecov {

namespace {

constexpr double kTruthZero = 1e-12;

std::vector<IndexPair> nonzero_pairs(const Eigen::MatrixXd& m) {
  const double tol = kTruthZero * m.cwiseAbs().maxCoeff();
  std::vector<IndexPair> out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = i + 1; j < m.cols(); ++j) {
      if (std::abs(m(i, j)) > tol) out.emplace_back(i, j);
    }
  }
  return out;
}

Eigen::MatrixXd tridiagonal(Index p, double offdiag) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(p, p);
  for (Index i = 0; i + 1 < p; ++i) {
    m(i, i + 1) = offdiag;
    m(i + 1, i) = offdiag;
  }
  return m;
}

double parse_field(std::string_view field, std::string_view spec) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw InvalidInput("cannot parse truth spec '" + std::string(spec) + "'");
  }
  return v;
}

}  // namespace

TruthSpec parse_truth(std::string_view spec, Index p, std::uint64_t seed) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = spec.find(':', start);
    parts.push_back(spec.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  TruthSpec out;
  out.p = p;
  out.seed = seed;
  const std::string_view kind = parts.front();
  if (kind == "tridiag" && parts.size() == 2) {
    out.kind = TruthKind::TridiagonalPrecision;
    out.value = parse_field(parts[1], spec);
  } else if (kind == "tridiag-cov" && parts.size() == 2) {
    out.kind = TruthKind::TridiagonalCovariance;
    out.value = parse_field(parts[1], spec);
  } else if (kind == "ar1" && parts.size() == 2) {
    out.kind = TruthKind::AR1Covariance;
    out.value = parse_field(parts[1], spec);
  } else if (kind == "sparse" && parts.size() == 3) {
    out.kind = TruthKind::SparseRandomPrecision;
    out.density = parse_field(parts[1], spec);
    out.value = parse_field(parts[2], spec);
  } else {
    throw InvalidInput("cannot parse truth spec '" + std::string(spec) +
                       "' (expected tridiag:V, tridiag-cov:V, ar1:PHI or sparse:DENSITY:MAG)");
  }
  return out;
}

std::string to_string(const TruthSpec& spec) {
  std::ostringstream os;
  switch (spec.kind) {
    case TruthKind::TridiagonalPrecision:
      os << "tridiag:" << spec.value;
      break;
    case TruthKind::TridiagonalCovariance:
      os << "tridiag-cov:" << spec.value;
      break;
    case TruthKind::AR1Covariance:
      os << "ar1:" << spec.value;
      break;
    case TruthKind::SparseRandomPrecision:
      os << "sparse:" << spec.density << ":" << spec.value;
      break;
  }
  return os.str();
}

std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  auto splitmix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = splitmix(seed);
  for (const std::uint64_t k : keys) h = splitmix(h ^ splitmix(k + 0x632be59bd9b4e019ULL));
  return h;
}

Truth gen_truth(const TruthSpec& spec) {
  const Index p = spec.p;
  if (p < 1) throw InvalidInput("truth dimension must be >= 1");
  Truth out;
  switch (spec.kind) {
    case TruthKind::TridiagonalPrecision: {
      if (!(std::abs(spec.value) < 0.5)) throw NotPositiveDefinite("tridiagonal off-diagonal must satisfy |v| < 0.5");
      out.omega = SymMatrix(tridiagonal(p, spec.value));
      out.sigma = inverse(out.omega);
      break;
    }
    case TruthKind::TridiagonalCovariance: {
      if (!(std::abs(spec.value) < 0.5)) throw NotPositiveDefinite("tridiagonal off-diagonal must satisfy |v| < 0.5");
      out.sigma = SymMatrix(tridiagonal(p, spec.value));
      out.omega = inverse(out.sigma);
      break;
    }
    case TruthKind::AR1Covariance: {
      if (!(std::abs(spec.value) < 1.0)) throw NotPositiveDefinite("AR(1) coefficient must satisfy |phi| < 1");
      Eigen::MatrixXd sigma(p, p);
      for (Index i = 0; i < p; ++i) {
        for (Index j = 0; j < p; ++j) sigma(i, j) = std::pow(spec.value, static_cast<double>(std::abs(i - j)));
      }
      out.sigma = SymMatrix(sigma);
      // Exact banded inverse of the AR(1) covariance.
      const double phi = spec.value;
      const double c = 1.0 / (1.0 - phi * phi);
      Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(p, p);
      for (Index i = 0; i < p; ++i) {
        omega(i, i) = (i == 0 || i == p - 1) ? c : (1.0 + phi * phi) * c;
        if (i + 1 < p) {
          omega(i, i + 1) = -phi * c;
          omega(i + 1, i) = -phi * c;
        }
      }
      if (p == 1) omega(0, 0) = 1.0;
      out.omega = SymMatrix(omega);
      break;
    }
    case TruthKind::SparseRandomPrecision: {
      if (!(spec.density >= 0.0 && spec.density <= 1.0) || !(spec.value > 0.0)) {
        throw InvalidInput("sparse truth needs density in [0, 1] and magnitude > 0");
      }
      std::mt19937_64 rng(mix_seed(spec.seed, {0x7275747275ULL, static_cast<std::uint64_t>(p)}));
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(p, p);
      for (Index i = 0; i < p; ++i) {
        for (Index j = i + 1; j < p; ++j) {
          if (unif(rng) < spec.density) {
            const double v = unif(rng) < 0.5 ? -spec.value : spec.value;
            omega(i, j) = v;
            omega(j, i) = v;
          }
        }
      }
      // Common diagonal large enough for strict diagonal dominance.
      const double row_max = omega.cwiseAbs().rowwise().sum().maxCoeff();
      omega.diagonal().setConstant(std::max(1.0, row_max + 0.2));
      out.omega = SymMatrix(omega);
      out.sigma = inverse(out.omega);
      break;
    }
  }
  out.precision_support = nonzero_pairs(out.omega.mat());
  out.covariance_support = nonzero_pairs(out.sigma.mat());
  out.tau_max = operator_norm(out.sigma.mat());
  out.tau_min = 1.0 / operator_norm(out.omega.mat());
  return out;
}

TargetTruth truth_for_target(const Truth& truth, Target target) {
  const Eigen::VectorXd w = truth.sigma.diag().cwiseSqrt();
  switch (target) {
    case Target::Precision:
    case Target::CholeskyML:
    case Target::CholeskyLS:
    case Target::CholeskyNL:
      return {truth.omega, truth.precision_support};
    case Target::InverseCorrelation:
      return {scale_both_sides(truth.omega, w), truth.precision_support};
    case Target::Covariance:
      return {truth.sigma, truth.covariance_support};
    case Target::Correlation:
      return {scale_both_sides(truth.sigma, w.cwiseInverse()), truth.covariance_support};
  }
  throw InvalidInput("unknown target");
}

Eigen::MatrixXd sample_gaussian(const SymMatrix& sigma, Index n, std::uint64_t seed) {
  if (n < 1) throw InvalidInput("sample_gaussian needs n >= 1");
  const LowerTriangular l = cholesky_factor(sigma);
  const Index p = sigma.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(n, p);
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < p; ++c) z(r, c) = normal(rng);
  }
  return kernels::lower_transform_omp(z, l.mat());
}

SupportRates support_metrics(const std::vector<IndexPair>& truth_support, const SymMatrix& estimate,
                             double support_tol) {
  const Index p = estimate.dim();
  for (const auto& [i, j] : truth_support) {
    if (i < 0 || j < 0 || i >= p || j >= p || i == j) {
      throw DimensionMismatch("support pair outside the estimate's off-diagonal");
    }
  }
  Eigen::MatrixXi truth = Eigen::MatrixXi::Zero(p, p);
  for (const auto& [i, j] : truth_support) {
    truth(std::min(i, j), std::max(i, j)) = 1;
  }
  long zeros = 0, zeros_hit = 0, nonzeros = 0, nonzeros_hit = 0;
  for (Index i = 0; i < p; ++i) {
    for (Index j = i + 1; j < p; ++j) {
      const bool estimated_zero = std::abs(estimate(i, j)) <= support_tol;
      if (truth(i, j)) {
        ++nonzeros;
        if (!estimated_zero) ++nonzeros_hit;
      } else {
        ++zeros;
        if (estimated_zero) ++zeros_hit;
      }
    }
  }
  SupportRates out;
  if (zeros > 0) out.true_zero = static_cast<double>(zeros_hit) / static_cast<double>(zeros);
  if (nonzeros > 0) out.true_nonzero = static_cast<double>(nonzeros_hit) / static_cast<double>(nonzeros);
  return out;
}

ErrorMetrics error_metrics(const SymMatrix& truth, const SymMatrix& estimate) {
  if (truth.dim() != estimate.dim()) throw DimensionMismatch("error_metrics: dimension mismatch");
  const Eigen::MatrixXd diff = estimate.mat() - truth.mat();
  const double op = operator_norm(diff);
  return {diff.squaredNorm(), op * op};
}

void RateExperiment::validate() const {
  if (replicates < 1) throw InvalidInput("replicates must be >= 1");
  if (n_values.empty() || p_values.empty()) throw InvalidInput("rate experiment needs n and p values");
  for (const Index n : n_values) {
    if (n < 2) throw InvalidInput("n values must be >= 2");
  }
  for (const Index p : p_values) {
    if (p < 2) throw InvalidInput("p values must be >= 2");
  }
  if (!(lambda_scale >= 0.0)) throw InvalidInput("lambda scale must be >= 0");
  estimator.validate();
}

namespace {

double oracle_unit(Index p, Index n) {
  return std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

Truth cell_truth(const RateExperiment& exp, Index p) {
  TruthSpec spec = exp.truth;
  spec.p = p;
  spec.seed = mix_seed(exp.seed, {0x74727574ULL, static_cast<std::uint64_t>(p)});
  return gen_truth(spec);
}

}  // namespace

ReplicateOutcome run_replicate(const RateExperiment& exp, const Truth& truth, Index n, int replicate) {
  ReplicateOutcome out;
  const Index p = truth.sigma.dim();
  const std::uint64_t seed = mix_seed(
      exp.seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(replicate)});
  try {
    const Eigen::MatrixXd data = sample_gaussian(truth.sigma, n, seed);
    const SymMatrix s = sample_covariance(data, false);
    const TargetTruth target = truth_for_target(truth, exp.estimator.target);

    SymMatrix est;
    if (exp.estimator_override) {
      est = exp.estimator_override(s, truth);
    } else {
      const double unit = oracle_unit(p, n);
      EstimationResult fit;
      if (exp.lambda_rule == LambdaRule::OracleScale) {
        EstimatorConfig cfg = exp.estimator;
        out.lambda = exp.lambda_scale * unit;
        cfg.penalty = cfg.penalty.with_lambda(out.lambda);
        fit = estimate(s, cfg);
      } else {
        std::vector<double> lambdas;
        if (exp.grid_scales.empty()) {
          lambdas = LambdaGrid::default_for(p, n).values();
        } else {
          for (const double c : exp.grid_scales) lambdas.push_back(c * unit);
        }
        Selection sel = select_lambda(s, n, LambdaGrid(lambdas), exp.estimator);
        out.lambda = sel.best_lambda;
        fit = std::move(sel.best);
      }
      if (!fit.converged) return out;
      est = fit.estimate;
    }

    const ErrorMetrics err = error_metrics(target.matrix, est);
    const SupportRates rates = support_metrics(target.support, est, support_tolerance(est.mat()));
    out.sq_frobenius = err.sq_frobenius;
    out.sq_operator = err.sq_operator;
    out.true_zero = rates.true_zero;
    out.true_nonzero = rates.true_nonzero;
    out.ok = true;
  } catch (const Error&) {
    out.ok = false;
  }
  return out;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("fit_line needs at least two points");
  const double m = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidInput("fit_line: x values are all equal");
  LineFit out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - out.intercept - out.slope * x[i];
      rss += r * r;
    }
    out.slope_se = std::sqrt(rss / (m - 2.0) / sxx);
  }
  return out;
}

namespace {

struct Task {
  std::size_t cell;
  int replicate;
};

RateReport aggregate(const RateExperiment& exp, const std::vector<Truth>& truths,
                     const std::vector<std::vector<ReplicateOutcome>>& outcomes) {
  RateReport report;
  std::size_t cell_index = 0;
  for (std::size_t pi = 0; pi < exp.p_values.size(); ++pi) {
    const TargetTruth target = truth_for_target(truths[pi], exp.estimator.target);
    for (const Index n : exp.n_values) {
      const auto& reps = outcomes[cell_index++];
      RateCell cell;
      cell.n = n;
      cell.p = exp.p_values[pi];
      cell.s = 2 * static_cast<Index>(target.support.size());
      std::vector<const ReplicateOutcome*> ok;
      for (const auto& r : reps) {
        if (r.ok) {
          ok.push_back(&r);
        } else {
          ++cell.failures;
        }
      }
      cell.completed = static_cast<int>(ok.size());
      if (ok.empty()) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        cell.mean_sq_frobenius = cell.sd_sq_frobenius = nan;
        cell.mean_sq_operator = cell.sd_sq_operator = nan;
        cell.true_zero_rate = cell.true_nonzero_rate = cell.mean_lambda = nan;
      } else {
        const double m = static_cast<double>(ok.size());
        for (const auto* r : ok) {
          cell.mean_sq_frobenius += r->sq_frobenius / m;
          cell.mean_sq_operator += r->sq_operator / m;
          cell.true_zero_rate += r->true_zero / m;
          cell.true_nonzero_rate += r->true_nonzero / m;
          cell.mean_lambda += r->lambda / m;
        }
        if (ok.size() > 1) {
          double vf = 0.0, vo = 0.0;
          for (const auto* r : ok) {
            vf += (r->sq_frobenius - cell.mean_sq_frobenius) * (r->sq_frobenius - cell.mean_sq_frobenius);
            vo += (r->sq_operator - cell.mean_sq_operator) * (r->sq_operator - cell.mean_sq_operator);
          }
          cell.sd_sq_frobenius = std::sqrt(vf / (m - 1.0));
          cell.sd_sq_operator = std::sqrt(vo / (m - 1.0));
        }
      }
      report.cells.push_back(cell);
    }
  }

  std::vector<double> x_rate, x_n, y;
  for (const auto& c : report.cells) {
    if (c.completed == 0 || !(c.mean_sq_frobenius > 0.0)) continue;
    const double lp = std::log(static_cast<double>(c.p));
    x_rate.push_back(std::log(static_cast<double>(c.p + c.s) * lp / static_cast<double>(c.n)));
    x_n.push_back(std::log(static_cast<double>(c.n)));
    y.push_back(std::log(c.mean_sq_frobenius));
  }
  auto safe_fit = [](const std::vector<double>& x, const std::vector<double>& yy) {
    try {
      return fit_line(x, yy);
    } catch (const InvalidInput&) {
      return LineFit{std::nan(""), std::nan(""), std::nan("")};
    }
  };
  const LineFit rate_fit = safe_fit(x_rate, y);
  const LineFit n_fit = safe_fit(x_n, y);
  report.slope_rate = rate_fit.slope;
  report.slope_rate_se = rate_fit.slope_se;
  report.slope_n = n_fit.slope;
  report.slope_n_se = n_fit.slope_se;
  return report;
}

RateReport run_experiment(const RateExperiment& exp, bool parallel) {
  exp.validate();
  std::vector<Truth> truths;
  truths.reserve(exp.p_values.size());
  for (const Index p : exp.p_values) truths.push_back(cell_truth(exp, p));

  const std::size_t cells = exp.p_values.size() * exp.n_values.size();
  std::vector<std::vector<ReplicateOutcome>> outcomes(
      cells, std::vector<ReplicateOutcome>(static_cast<std::size_t>(exp.replicates)));
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cells; ++c) {
    for (int r = 0; r < exp.replicates; ++r) tasks.push_back({c, r});
  }

  auto run_task = [&](const Task& task) {
    const std::size_t pi = task.cell / exp.n_values.size();
    const Index n = exp.n_values[task.cell % exp.n_values.size()];
    outcomes[task.cell][static_cast<std::size_t>(task.replicate)] = run_replicate(exp, truths[pi], n, task.replicate);
  };

  const auto count = static_cast<std::ptrdiff_t>(tasks.size());
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t t = 0; t < count; ++t) run_task(tasks[static_cast<std::size_t>(t)]);
  } else {
    for (std::ptrdiff_t t = 0; t < count; ++t) run_task(tasks[static_cast<std::size_t>(t)]);
  }
  return aggregate(exp, truths, outcomes);
}

}  // namespace

RateReport run_rate_experiment(const RateExperiment& exp) { return run_experiment(exp, true); }

RateReport run_rate_experiment_serial(const RateExperiment& exp) { return run_experiment(exp, false); }

}  // namespace sparsecov
