#include "sparsecov/cholesky.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sparsecov/solvers.hpp"

namespace sparsecov {

MCDPair mcd(const SymMatrix& sigma) {
  const LowerTriangular l = cholesky_factor(sigma);
  const Index p = sigma.dim();
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(p, p);
  Eigen::VectorXd d(p);
  d(0) = sigma(0, 0);
  for (Index i = 1; i < p; ++i) {
    // Regression of variable i on 0..i-1 through the leading Cholesky block.
    const auto lead = l.mat().topLeftCorner(i, i).triangularView<Eigen::Lower>();
    Eigen::VectorXd coef = sigma.mat().col(i).head(i);
    lead.solveInPlace(coef);
    lead.transpose().solveInPlace(coef);
    t.row(i).head(i) = -coef.transpose();
    d(i) = l(i, i) * l(i, i);
  }
  return {LowerTriangular(t), DiagMatrix(d)};
}

namespace {

// 2 * sum_{j<i} p(|t_ij|).
double lower_penalty(const Penalty& pen, const Eigen::MatrixXd& t) {
  double acc = 0.0;
  for (Index i = 1; i < t.rows(); ++i) {
    for (Index j = 0; j < i; ++j) acc += pen.value(t(i, j));
  }
  return 2.0 * acc;
}

// 2 * sum_{j<i} w_ij |t_ij|.
double lower_weighted_l1(const Eigen::MatrixXd& w, const Eigen::MatrixXd& t) {
  double acc = 0.0;
  for (Index i = 1; i < t.rows(); ++i) {
    for (Index j = 0; j < i; ++j) acc += w(i, j) * std::abs(t(i, j));
  }
  return 2.0 * acc;
}

Eigen::MatrixXd lower_weights(const Penalty& pen, const Eigen::MatrixXd& t) {
  const Index p = t.rows();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p, p);
  for (Index i = 1; i < p; ++i) {
    for (Index j = 0; j < i; ++j) w(i, j) = pen.derivative(std::abs(t(i, j)));
  }
  return w;
}

std::vector<IndexPair> lower_support(const Eigen::MatrixXd& t) {
  const double tol = support_tolerance(t);
  std::vector<IndexPair> out;
  for (Index i = 1; i < t.rows(); ++i) {
    for (Index j = 0; j < i; ++j) {
      if (std::abs(t(i, j)) > tol) out.emplace_back(i, j);
    }
  }
  return out;
}

// diag(T S T^T).
Eigen::VectorXd residual_variances(const SymMatrix& s, const Eigen::MatrixXd& t) {
  const Index p = s.dim();
  Eigen::VectorXd out(p);
  for (Index i = 0; i < p; ++i) {
    const auto row = t.row(i).head(i + 1);
    out(i) = row * s.mat().topLeftCorner(i + 1, i + 1) * row.transpose();
  }
  return out;
}

void check_common(const SymMatrix& s, const EstimatorConfig& cfg, bool allow_singular) {
  cfg.validate();
  for (Index i = 0; i < s.dim(); ++i) {
    if (!(s(i, i) > 0.0)) {
      throw DegenerateColumn("variable " + std::to_string(i) + " has non-positive variance");
    }
  }
  if (!allow_singular && cfg.penalty.lambda() == 0.0 && !is_positive_definite(s)) {
    throw NotPositiveDefinite("singular sample covariance requires lambda > 0");
  }
}

struct RowSweepStats {
  bool converged = true;
  int sweeps = 0;
};

// Every row i >= 1 solves a weighted lasso with Gram S_[0,i) / scale_i and
// response S_[0,i),i / scale_i; T stores minus the coefficients.
RowSweepStats regress_rows(const SymMatrix& s, const Eigen::VectorXd& scale, const Eigen::MatrixXd& w,
                           const SolverOptions& opts, Eigen::MatrixXd& t) {
  const Index p = s.dim();
  bool converged = true;
  int sweeps = 0;
#pragma omp parallel for schedule(dynamic) reduction(&& : converged) reduction(+ : sweeps)
  for (Index i = 1; i < p; ++i) {
    const Eigen::MatrixXd gram = s.mat().topLeftCorner(i, i) / scale(i);
    const Eigen::VectorXd rhs = s.mat().col(i).head(i) / scale(i);
    const Eigen::VectorXd weights = w.row(i).head(i).transpose();
    const Eigen::VectorXd start = -t.row(i).head(i).transpose();
    const LassoResult fit = lasso_weighted(gram, rhs, weights, opts, &start);
    t.row(i).head(i) = -fit.beta.transpose();
    converged = converged && fit.converged;
    sweeps += fit.sweeps;
  }
  return {converged, sweeps};
}

Eigen::VectorXd checked_variances(const SymMatrix& s, const Eigen::MatrixXd& t) {
  Eigen::VectorXd d = residual_variances(s, t);
  const double floor = 1e-12 * s.diag().maxCoeff();
  for (Index i = 0; i < d.size(); ++i) {
    if (!(d(i) > floor)) {
      throw NotPositiveDefinite("residual variance of variable " + std::to_string(i) + " vanished");
    }
  }
  return d;
}

double ml_surrogate(const SymMatrix& s, const Eigen::MatrixXd& t, const Eigen::VectorXd& d,
                    const Eigen::MatrixXd& w) {
  const Eigen::VectorXd r = residual_variances(s, t);
  return r.cwiseQuotient(d).sum() + d.array().log().sum() + lower_weighted_l1(w, t);
}

SymMatrix precision_from_factors(const Eigen::MatrixXd& t, const Eigen::VectorXd& d) {
  return SymMatrix(t.transpose() * d.cwiseInverse().asDiagonal() * t);
}

// With the sign pattern of the off-diagonal part fixed, the row conditions
// reduce to b = -t u - v (u = G_AA^-1 g_A, v = G_AA^-1 w_A sign_A) and a
// quadratic in the diagonal entry t. The result is kept only if it satisfies
// the full optimality conditions.
bool polish_nl_row(const Eigen::MatrixXd& g11, const Eigen::VectorXd& g1, double gii, const Eigen::VectorXd& w,
                   Eigen::VectorXd& row) {
  const Index m = g1.size();
  std::vector<Index> active;
  for (Index j = 0; j < m; ++j) {
    if (w(j) == 0.0 || row(j) != 0.0) active.push_back(j);
  }
  Eigen::VectorXd cand = Eigen::VectorXd::Zero(m + 1);
  if (active.empty()) {
    cand(m) = nl_diagonal_root(gii, 0.0);
  } else {
    const auto k = static_cast<Index>(active.size());
    Eigen::VectorXd sw(k);
    for (Index a = 0; a < k; ++a) {
      const Index j = active[static_cast<std::size_t>(a)];
      sw(a) = w(j) == 0.0 ? 0.0 : (row(j) > 0.0 ? w(j) : -w(j));
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(g11(active, active));
    if (llt.info() != Eigen::Success) return false;
    const Eigen::VectorXd ga = g1(active);
    const Eigen::VectorXd u = llt.solve(ga);
    const Eigen::VectorXd v = llt.solve(sw);
    const double quad = gii - ga.dot(u);
    if (!(quad > 0.0)) return false;
    const double tii = nl_diagonal_root(quad, -ga.dot(v));
    const Eigen::VectorXd b = -tii * u - v;
    for (Index a = 0; a < k; ++a) {
      const Index j = active[static_cast<std::size_t>(a)];
      if (w(j) != 0.0 && !(b(a) * row(j) > 0.0)) return false;
      cand(j) = b(a);
    }
    cand(m) = tii;
  }
  const Eigen::VectorXd grad = g11 * cand.head(m) + cand(m) * g1;
  const double slack = 1e-9 * std::max(1.0, cand.cwiseAbs().maxCoeff());
  for (Index j = 0; j < m; ++j) {
    if (cand(j) == 0.0 && std::abs(grad(j)) > w(j) + slack) return false;
  }
  row = cand;
  return true;
}

}  // namespace

double cholesky_ml_objective(const SymMatrix& s, const LowerTriangular& t, const DiagMatrix& d, const Penalty& pen) {
  const Eigen::VectorXd r = residual_variances(s, t.mat());
  return r.cwiseQuotient(d.values()).sum() + d.values().array().log().sum() + lower_penalty(pen, t.mat());
}

double cholesky_ls_objective(const SymMatrix& s, const LowerTriangular& t, const Penalty& pen) {
  return residual_variances(s, t.mat()).sum() + lower_penalty(pen, t.mat());
}

double cholesky_nl_objective(const SymMatrix& corr, const LowerTriangular& t, const Penalty& pen) {
  const Eigen::VectorXd diag = t.mat().diagonal();
  if ((diag.array() <= 0.0).any()) throw InvalidInput("NL objective needs a positive diagonal in T");
  return residual_variances(corr, t.mat()).sum() - 2.0 * diag.array().log().sum() + lower_penalty(pen, t.mat());
}

double nl_diagonal_root(double g, double c) {
  if (!(g > 0.0)) throw InvalidInput("nl_diagonal_root needs g > 0");
  // Rationalized form of (-c + sqrt(c^2 + 4g)) / (2g), stable for large positive c.
  const double disc = std::sqrt(c * c + 4.0 * g);
  return c >= 0.0 ? 2.0 / (c + disc) : (disc - c) / (2.0 * g);
}

EstimationResult estimate_cholesky_ml(const SymMatrix& s, const EstimatorConfig& cfg) {
  check_common(s, cfg, false);
  constexpr int kMaxAlternations = 50;
  const Index p = s.dim();

  EstimationResult out;
  out.target = Target::CholeskyML;
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(p, p);
  // D first: with T = I the optimal residual variances are diag(S).
  Eigen::VectorXd d = s.diag();
  Eigen::MatrixXd previous_w;

  for (int k = 0; k < cfg.lla_iters; ++k) {
    const Eigen::MatrixXd w = lower_weights(cfg.penalty, t);
    if (k > 0 && w == previous_w) break;
    std::vector<double> inner{ml_surrogate(s, t, d, w)};
    bool settled = false;
    for (int a = 0; a < kMaxAlternations; ++a) {
      const RowSweepStats rows = regress_rows(s, d, w, cfg.solver, t);
      out.converged = out.converged && rows.converged;
      out.sweeps_used += rows.sweeps;
      inner.push_back(ml_surrogate(s, t, d, w));

      d = checked_variances(s, t);
      const double q = ml_surrogate(s, t, d, w);
      const double before = inner[inner.size() - 2];
      inner.push_back(q);
      if (std::abs(before - q) <= cfg.solver.tol * (1.0 + std::abs(q))) {
        settled = true;
        break;
      }
    }
    out.converged = out.converged && settled;
    out.inner_traces.push_back(std::move(inner));
    out.objective_trace.push_back(
        cholesky_ml_objective(s, LowerTriangular(t), DiagMatrix(d), cfg.penalty));
    previous_w = w;
  }

  out.estimate = precision_from_factors(t, d);
  out.support = lower_support(t);
  out.cholesky_t = LowerTriangular(t);
  out.cholesky_d = DiagMatrix(d);
  return out;
}

EstimationResult estimate_cholesky_ls(const SymMatrix& s, const EstimatorConfig& cfg) {
  check_common(s, cfg, true);
  const Index p = s.dim();

  EstimationResult out;
  out.target = Target::CholeskyLS;
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(p, p);
  const Eigen::VectorXd unit = Eigen::VectorXd::Ones(p);
  Eigen::MatrixXd previous_w;

  for (int k = 0; k < cfg.lla_iters; ++k) {
    const Eigen::MatrixXd w = lower_weights(cfg.penalty, t);
    if (k > 0 && w == previous_w) break;
    const RowSweepStats rows = regress_rows(s, unit, w, cfg.solver, t);
    out.converged = out.converged && rows.converged;
    out.sweeps_used += rows.sweeps;
    out.objective_trace.push_back(cholesky_ls_objective(s, LowerTriangular(t), cfg.penalty));
    previous_w = w;
  }

  const Eigen::VectorXd d = checked_variances(s, t);
  out.estimate = precision_from_factors(t, d);
  out.support = lower_support(t);
  out.cholesky_t = LowerTriangular(t);
  out.cholesky_d = DiagMatrix(d);
  return out;
}

EstimationResult estimate_cholesky_nl(const SymMatrix& s, const EstimatorConfig& cfg) {
  check_common(s, cfg, false);
  const CorrelationScaling scaled = to_correlation(s);
  const Eigen::MatrixXd& g = scaled.correlation.mat();
  const Index p = s.dim();

  EstimationResult out;
  out.target = Target::CholeskyNL;
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(p, p);
  Eigen::MatrixXd previous_w;
  const SolverOptions inner{cfg.solver.tol * 0.1, std::max(cfg.solver.max_sweeps, 1000), cfg.solver.pd_backtrack};

  for (int k = 0; k < cfg.lla_iters; ++k) {
    const Eigen::MatrixXd w = lower_weights(cfg.penalty, t);
    if (k > 0 && w == previous_w) break;
    bool converged = true;
    int sweeps = 0;
#pragma omp parallel for schedule(dynamic) reduction(&& : converged) reduction(+ : sweeps)
    for (Index i = 0; i < p; ++i) {
      Eigen::VectorXd row = t.row(i).head(i + 1).transpose();
      const Eigen::MatrixXd g11 = g.topLeftCorner(i, i);
      const Eigen::VectorXd g1 = g.col(i).head(i);
      const Eigen::VectorXd wi = w.row(i).head(i).transpose();
      bool row_done = false;
      int sweep = 0;
      while (sweep < cfg.solver.max_sweeps && !row_done) {
        ++sweep;
        const Eigen::VectorXd before = row;
        if (i > 0) {
          // Off-diagonal block given the diagonal entry is a weighted lasso.
          const Eigen::VectorXd start = row.head(i);
          const LassoResult fit = lasso_weighted(g11, -row(i) * g1, wi, inner, &start);
          row.head(i) = fit.beta;
        }
        row(i) = nl_diagonal_root(g(i, i), g1.dot(row.head(i)));
        if (i > 0 && polish_nl_row(g11, g1, g(i, i), wi, row)) {
          row_done = true;
          break;
        }
        row_done = (row - before).cwiseAbs().maxCoeff() <= cfg.solver.tol * row.cwiseAbs().maxCoeff();
      }
      t.row(i).head(i + 1) = row.transpose();
      converged = converged && row_done;
      sweeps += sweep;
    }
    out.converged = out.converged && converged;
    out.sweeps_used += sweeps;
    out.objective_trace.push_back(cholesky_nl_objective(scaled.correlation, LowerTriangular(t), cfg.penalty));
    previous_w = w;
  }

  const Eigen::VectorXd winv = scaled.scale.values().cwiseInverse();
  out.estimate = scale_both_sides(SymMatrix(t.transpose() * t), winv);
  out.support = lower_support(t);
  out.cholesky_t = LowerTriangular(t);
  return out;
}

}  // namespace sparsecov
