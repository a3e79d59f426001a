#include "sparsecov/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <vector>

namespace sparsecov {

WeightMatrix::WeightMatrix(const Eigen::MatrixXd& w) {
  if (w.rows() != w.cols() || w.rows() < 1) throw DimensionMismatch("WeightMatrix must be square");
  if (!w.allFinite() || (w.array() < 0.0).any()) {
    throw InvalidInput("weights must be finite and nonnegative");
  }
  w_ = 0.5 * (w + w.transpose());
  w_.diagonal().setZero();
}

WeightMatrix WeightMatrix::uniform(Index p, double w) {
  return WeightMatrix(Eigen::MatrixXd::Constant(p, p, w));
}

bool WeightMatrix::all_offdiag_zero() const { return (w_.array() == 0.0).all(); }

void SolverOptions::validate() const {
  if (!(tol > 0.0)) throw InvalidInput("solver tol must be > 0");
  if (max_sweeps < 1) throw InvalidInput("solver max_sweeps must be >= 1");
  if (!(pd_backtrack > 0.0 && pd_backtrack < 1.0)) throw InvalidInput("pd_backtrack must lie in (0, 1)");
}

namespace {

// Sign of each coordinate; unpenalized coordinates are always free (2).
std::vector<int> sign_pattern(const Eigen::VectorXd& beta, const Eigen::VectorXd& weights) {
  std::vector<int> out(static_cast<std::size_t>(beta.size()));
  for (Index j = 0; j < beta.size(); ++j) {
    out[static_cast<std::size_t>(j)] = weights(j) == 0.0 ? 2 : (beta(j) > 0.0) - (beta(j) < 0.0);
  }
  return out;
}

// With the sign pattern fixed the lasso is a linear system on the active set.
// The solution is accepted only if it keeps the signs and satisfies the
// optimality conditions on the inactive set.
bool polish_active_set(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs, const Eigen::VectorXd& weights,
                       const std::vector<int>& pattern, Eigen::VectorXd& beta) {
  std::vector<Index> active;
  for (Index j = 0; j < rhs.size(); ++j) {
    if (pattern[static_cast<std::size_t>(j)] != 0) active.push_back(j);
  }
  Eigen::VectorXd candidate = Eigen::VectorXd::Zero(rhs.size());
  if (!active.empty()) {
    Eigen::VectorXd b(static_cast<Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) {
      const Index j = active[k];
      const int sg = pattern[static_cast<std::size_t>(j)];
      b(static_cast<Index>(k)) = rhs(j) - (sg == 2 ? 0.0 : sg * weights(j));
    }
    const Eigen::MatrixXd g = gram(active, active);
    const Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success) return false;
    const Eigen::VectorXd x = llt.solve(b);
    if (!x.allFinite()) return false;
    for (std::size_t k = 0; k < active.size(); ++k) {
      const Index j = active[k];
      const int sg = pattern[static_cast<std::size_t>(j)];
      const double v = x(static_cast<Index>(k));
      if (sg != 2 && !(v * sg > 0.0)) return false;
      candidate(j) = v;
    }
  }
  const Eigen::VectorXd grad = rhs - gram * candidate;
  const double slack = 1e-9 * std::max(1.0, rhs.cwiseAbs().maxCoeff());
  for (Index j = 0; j < rhs.size(); ++j) {
    if (pattern[static_cast<std::size_t>(j)] == 0 && std::abs(grad(j)) > weights(j) + slack) return false;
  }
  beta = candidate;
  return true;
}

}  // namespace

LassoResult lasso_weighted(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs,
                           const Eigen::VectorXd& weights, const SolverOptions& opts,
                           const Eigen::VectorXd* start) {
  opts.validate();
  const Index m = rhs.size();
  if (gram.rows() != m || gram.cols() != m || weights.size() != m) {
    throw DimensionMismatch("lasso_weighted: inconsistent sizes");
  }
  for (Index j = 0; j < m; ++j) {
    if (!(gram(j, j) > 0.0)) throw InvalidInput("lasso_weighted: Gram diagonal must be positive");
  }

  LassoResult out;
  out.beta = start ? *start : Eigen::VectorXd::Zero(m);
  if (out.beta.size() != m) throw DimensionMismatch("lasso_weighted: start has wrong size");

  // grad = rhs - G beta, kept current after every coordinate move.
  Eigen::VectorXd grad = rhs - gram * out.beta;
  std::vector<int> pattern = sign_pattern(out.beta, weights);
  std::vector<int> tried;
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    double max_move = 0.0;
    for (Index j = 0; j < m; ++j) {
      const double gjj = gram(j, j);
      const double old = out.beta(j);
      const double z = grad(j) + gjj * old;
      const double next = soft_threshold(z, weights(j)) / gjj;
      const double delta = next - old;
      if (delta != 0.0) {
        out.beta(j) = next;
        grad.noalias() -= delta * gram.col(j);
        max_move = std::max(max_move, std::abs(delta));
      }
    }
    out.sweeps = sweep;
    const double scale = std::max(out.beta.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    if (max_move <= opts.tol * scale) {
      out.converged = true;
      break;
    }
    std::vector<int> now = sign_pattern(out.beta, weights);
    if (now == pattern && now != tried) {
      if (polish_active_set(gram, rhs, weights, now, out.beta)) {
        out.converged = true;
        break;
      }
      tried = now;
    }
    pattern = std::move(now);
  }
  return out;
}

namespace {

double offdiag_penalty(const Eigen::MatrixXd& x, const WeightMatrix& w) {
  double acc = 0.0;
  const Index p = x.rows();
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) {
      if (i != j) acc += w(i, j) * std::abs(x(i, j));
    }
  }
  return acc;
}

// Off-diagonal sign pattern of an iterate; entries with zero weight are free
// (code 2).
std::vector<int> offdiag_pattern(const SymMatrix& x, const WeightMatrix& w) {
  const Index p = x.dim();
  std::vector<int> out;
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < j; ++i) {
      const double v = x(i, j);
      out.push_back(w(i, j) == 0.0 ? 2 : (v > 0.0) - (v < 0.0));
    }
  }
  return out;
}

constexpr std::size_t kMaxPolishVariables = 600;

enum class Param { Precision, Covariance };
enum class Polish { Failed, Improved, Solved };

// Active-set Newton with the sign pattern held fixed, where the penalty is
// linear. A step that would push an entry through zero stops at zero and the
// entry leaves the free set; zero entries violating their subgradient
// condition join it. The result is accepted only if it
// lowers the objective and satisfies the subgradient conditions.
Polish polish_fixed_signs(Param param, const SymMatrix& s, const WeightMatrix& w, std::vector<int> pattern,
                          bool pin_diagonal, SymMatrix& x, double& obj) {
  const bool cov = param == Param::Covariance;
  const Index p = s.dim();
  struct Var {
    Index i, j;
    int sign;
    std::size_t slot;  // index into pattern; unused for the diagonal
  };

  auto objective = [&](const SymMatrix& y) {
    const double smooth = cov ? s.mat().cwiseProduct(inverse(y).mat()).sum() + log_det(y)
                              : s.mat().cwiseProduct(y.mat()).sum() - log_det(y);
    return smooth + offdiag_penalty(y.mat(), w);
  };
  auto smooth_gradient = [&](const Eigen::MatrixXd& a) -> Eigen::MatrixXd {
    return cov ? Eigen::MatrixXd(a - a * s.mat() * a) : Eigen::MatrixXd(s.mat() - a);
  };
  auto pair_sum = [](const Eigen::MatrixXd& a, const Var& v) {
    return v.i == v.j ? a(v.i, v.i) : a(v.i, v.j) + a(v.j, v.i);
  };

  SymMatrix y = x;
  double y_obj = obj;
  const int max_rounds = 2 * static_cast<int>(pattern.size()) + 2;
  std::set<std::vector<int>> seen;
  for (int round = 0; round < max_rounds && seen.insert(pattern).second; ++round) {
    std::vector<Var> vars;
    if (!pin_diagonal) {
      for (Index i = 0; i < p; ++i) vars.push_back({i, i, 2, 0});
    }
    std::size_t k = 0;
    for (Index j = 0; j < p; ++j) {
      for (Index i = 0; i < j; ++i, ++k) {
        if (pattern[k] != 0) vars.push_back({i, j, pattern[k], k});
      }
    }
    if (vars.empty() || vars.size() > kMaxPolishVariables) break;
    const Index m = static_cast<Index>(vars.size());

    for (int it = 0; it < 50; ++it) {
      const Eigen::MatrixXd a = inverse(y).mat();
      const Eigen::MatrixXd b = cov ? Eigen::MatrixXd(a * s.mat() * a) : Eigen::MatrixXd();
      const Eigen::MatrixXd g = smooth_gradient(a);
      Eigen::VectorXd grad(m);
      Eigen::MatrixXd hess(m, m);
      // Basis direction of a variable: e_i e_j^T (+ e_j e_i^T off the diagonal).
      // tr(P e_a e_b^T Q e_c e_d^T) = P(d, a) Q(b, c).
      auto entry = [&](Index a0, Index b0, Index c0, Index d0) {
        return cov ? 2.0 * a(d0, a0) * b(b0, c0) - a(d0, a0) * a(b0, c0) : a(d0, a0) * a(b0, c0);
      };
      for (Index r = 0; r < m; ++r) {
        const Var& v = vars[static_cast<std::size_t>(r)];
        grad(r) = pair_sum(g, v) + (v.sign == 2 ? 0.0 : 2.0 * v.sign * w(v.i, v.j));
        for (Index c = 0; c <= r; ++c) {
          const Var& u = vars[static_cast<std::size_t>(c)];
          double h = entry(v.i, v.j, u.i, u.j);
          if (u.i != u.j) h += entry(v.i, v.j, u.j, u.i);
          if (v.i != v.j) {
            h += entry(v.j, v.i, u.i, u.j);
            if (u.i != u.j) h += entry(v.j, v.i, u.j, u.i);
          }
          hess(r, c) = h;
          hess(c, r) = h;
        }
      }
      // Levenberg shift when the nonconvex Hessian is indefinite.
      Eigen::LLT<Eigen::MatrixXd> llt(hess);
      double shift = 1e-10 * std::max(hess.diagonal().cwiseAbs().maxCoeff(), 1e-300);
      while (llt.info() != Eigen::Success && shift < 1e300) {
        llt.compute(hess + shift * Eigen::MatrixXd::Identity(m, m));
        shift *= 10.0;
      }
      if (llt.info() != Eigen::Success) break;
      const Eigen::VectorXd delta = -llt.solve(grad);
      if (!delta.allFinite()) break;
      Eigen::MatrixXd dir = Eigen::MatrixXd::Zero(p, p);
      for (Index r = 0; r < m; ++r) {
        const Var& v = vars[static_cast<std::size_t>(r)];
        dir(v.i, v.j) = delta(r);
        dir(v.j, v.i) = delta(r);
      }
      // Largest step before a signed entry reaches zero.
      double t_max = 1.0;
      for (Index r = 0; r < m; ++r) {
        const Var& v = vars[static_cast<std::size_t>(r)];
        if (v.sign != 2 && v.sign * delta(r) < 0.0) t_max = std::min(t_max, -y(v.i, v.j) / delta(r));
        if (v.sign != 2 && y(v.i, v.j) == 0.0 && v.sign * delta(r) < 0.0) t_max = 0.0;
      }
      double t = t_max;
      bool moved = false;
      bool hit_boundary = false;
      for (int bt = 0; bt < 40; ++bt, t *= 0.5) {
        Eigen::MatrixXd cm = y.mat() + t * dir;
        if (t == t_max && t_max < 1.0) {
          for (Index r = 0; r < m; ++r) {
            const Var& v = vars[static_cast<std::size_t>(r)];
            if (v.sign != 2 && cm(v.i, v.j) * v.sign <= 1e-12 * std::abs(y(v.i, v.j))) {
              cm(v.i, v.j) = cm(v.j, v.i) = 0.0;
            }
          }
        }
        const SymMatrix cand(cm);
        if (!is_positive_definite(cand)) continue;
        const double c_obj = objective(cand);
        if (c_obj <= y_obj) {
          y = cand;
          y_obj = c_obj;
          moved = true;
          hit_boundary = t == t_max && t_max < 1.0;
          break;
        }
      }
      if (hit_boundary) break;
      const double decrement = -grad.dot(delta);
      if (!moved || decrement <= 1e-28 * std::max(1.0, std::abs(y_obj))) break;
    }

    bool changed = false;
    for (const Var& v : vars) {
      if (v.sign != 2 && y(v.i, v.j) == 0.0) {
        pattern[v.slot] = 0;
        changed = true;
      }
    }
    if (changed) continue;
    // Zero entries whose subgradient condition fails join the free set.
    const Eigen::MatrixXd g = smooth_gradient(inverse(y).mat());
    k = 0;
    for (Index j = 0; j < p; ++j) {
      for (Index i = 0; i < j; ++i, ++k) {
        if (pattern[k] == 0 && std::abs(g(i, j)) > w(i, j) * (1.0 + 1e-9)) {
          pattern[k] = g(i, j) > 0.0 ? -1 : 1;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }

  if (!(y_obj <= obj)) return Polish::Failed;
  auto commit = [&](Polish status) {
    if (status == Polish::Improved && !(y_obj < obj)) return Polish::Failed;
    x = y;
    obj = y_obj;
    return status;
  };
  const Eigen::MatrixXd a = inverse(y).mat();
  const Eigen::MatrixXd g = smooth_gradient(a);
  // Rounding in g scales with the terms that cancel in it.
  const double term_scale = std::max({1.0, a.cwiseAbs().maxCoeff(), cov ? 0.0 : s.max_abs()});
  const double slack = 1e-8 * term_scale;
  std::size_t k = 0;
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < j; ++i, ++k) {
      const double v = y(i, j);
      if (v == 0.0) {
        if (std::abs(g(i, j)) > w(i, j) + slack) return commit(Polish::Improved);
      } else {
        const double sg = w(i, j) == 0.0 ? 0.0 : (v > 0.0 ? 1.0 : -1.0);
        if (std::abs(g(i, j) + sg * w(i, j)) > slack) return commit(Polish::Improved);
      }
    }
    if (!pin_diagonal && std::abs(g(j, j)) > slack) return commit(Polish::Improved);
  }
  return commit(Polish::Solved);
}

void check_square_pair(const SymMatrix& s, const WeightMatrix& w) {
  if (s.dim() != w.dim()) throw DimensionMismatch("S and weight matrix differ in dimension");
}

}  // namespace

double glasso_objective(const SymMatrix& s, const SymMatrix& omega, const WeightMatrix& w) {
  check_square_pair(s, w);
  return s.mat().cwiseProduct(omega.mat()).sum() - log_det(omega) + offdiag_penalty(omega.mat(), w);
}

double covariance_objective(const SymMatrix& s, const SymMatrix& sigma, const WeightMatrix& w) {
  check_square_pair(s, w);
  const SymMatrix inv = inverse(sigma);
  return s.mat().cwiseProduct(inv.mat()).sum() + log_det(sigma) + offdiag_penalty(sigma.mat(), w);
}

GlassoResult glasso_weighted(const SymMatrix& s, const WeightMatrix& w, const SolverOptions& opts,
                             const SymMatrix* start) {
  opts.validate();
  check_square_pair(s, w);
  const Index p = s.dim();
  for (Index i = 0; i < p; ++i) {
    if (!(s(i, i) > 0.0)) throw DegenerateColumn("glasso: S has a non-positive diagonal entry");
  }
  if (w.all_offdiag_zero() && !is_positive_definite(s)) {
    throw NotPositiveDefinite("singular sample covariance requires lambda > 0");
  }

  GlassoResult out;
  if (w.all_offdiag_zero()) {
    // Unpenalized: the minimizer is S^-1 in closed form.
    out.sigma = s;
    out.omega = inverse(s);
    out.converged = true;
    return out;
  }

  Eigen::MatrixXd omega;
  if (start) {
    if (start->dim() != p) throw DimensionMismatch("glasso: start has wrong dimension");
    omega = start->mat();
  } else {
    omega = s.diag().cwiseInverse().asDiagonal();
  }
  Eigen::MatrixXd sigma = inverse(SymMatrix(omega)).mat();

  if (p == 1) {
    out.omega = SymMatrix(Eigen::MatrixXd::Constant(1, 1, 1.0 / s(0, 0)));
    out.sigma = s;
    out.sweeps = 1;
    out.converged = true;
    return out;
  }

  const SolverOptions inner{opts.tol * 0.1, std::max(opts.max_sweeps, 1000), opts.pd_backtrack};
  std::vector<std::vector<Index>> others(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) {
    auto& idx = others[static_cast<std::size_t>(j)];
    for (Index k = 0; k < p; ++k) {
      if (k != j) idx.push_back(k);
    }
  }

  std::vector<int> pattern;
  int next_retry = 0;
  int retry_gap = 8;
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    double change = 0.0;
    for (Index j = 0; j < p; ++j) {
      const auto& idx = others[static_cast<std::size_t>(j)];
      const double sjj = s(j, j);
      const Eigen::VectorXd sig12 = sigma(idx, j);
      // Omega_11^-1 from the partitioned inverse of the running Sigma.
      const Eigen::MatrixXd a = Eigen::MatrixXd(sigma(idx, idx)) - sig12 * sig12.transpose() / sigma(j, j);
      const Eigen::MatrixXd gram = sjj * a;
      const Eigen::VectorXd rhs = -Eigen::VectorXd(s.mat()(idx, j));
      const Eigen::VectorXd weights = w.mat()(idx, j);
      const Eigen::VectorXd beta0 = omega(idx, j);

      const LassoResult col = lasso_weighted(gram, rhs, weights, inner, &beta0);
      const Eigen::VectorXd& beta = col.beta;
      const Eigen::VectorXd u = a * beta;
      const double omega_jj = 1.0 / sjj + beta.dot(u);

      change += 2.0 * (beta - beta0).cwiseAbs().sum() + std::abs(omega_jj - omega(j, j));
      omega(idx, j) = beta;
      omega(j, idx) = beta.transpose();
      omega(j, j) = omega_jj;

      sigma(idx, idx) = a + sjj * u * u.transpose();
      sigma(idx, j) = -sjj * u;
      sigma(j, idx) = -sjj * u.transpose();
      sigma(j, j) = sjj;
    }
    // Refresh Sigma from scratch to keep rank-one drift out of later sweeps.
    const SymMatrix omega_sym(omega);
    omega = omega_sym.mat();
    sigma = inverse(omega_sym).mat();

    out.sweeps = sweep;
    const double scale = omega.diagonal().cwiseAbs().mean();
    if (change / static_cast<double>(p * p) <= opts.tol * scale) {
      out.converged = true;
      break;
    }
    std::vector<int> now = offdiag_pattern(omega_sym, w);
    if (now == pattern && sweep >= next_retry) {
      SymMatrix polished = omega_sym;
      double obj = glasso_objective(s, omega_sym, w);
      const Polish status = polish_fixed_signs(Param::Precision, s, w, now, false, polished, obj);
      if (status != Polish::Failed) {
        omega = polished.mat();
        sigma = inverse(polished).mat();
      }
      if (status == Polish::Solved) {
        out.converged = true;
        break;
      }
      next_retry = sweep + retry_gap;
      retry_gap *= 2;
    }
    pattern = std::move(now);
  }
  out.omega = SymMatrix(omega);
  out.sigma = SymMatrix(sigma);
  return out;
}

ProxResult prox_covariance_weighted(const SymMatrix& s, const WeightMatrix& w, const SymMatrix& init,
                                    const SolverOptions& opts, bool pin_diagonal) {
  opts.validate();
  check_square_pair(s, w);
  if (init.dim() != s.dim()) throw DimensionMismatch("prox_covariance: init has wrong dimension");
  const Index p = s.dim();
  if (!is_positive_definite(init)) throw NotPositiveDefinite("prox_covariance: init is not positive definite");

  auto smooth = [&](const SymMatrix& x, const SymMatrix& xinv) {
    return s.mat().cwiseProduct(xinv.mat()).sum() + log_det(x);
  };
  auto gradient = [&](const SymMatrix& xinv) {
    Eigen::MatrixXd g = xinv.mat() - xinv.mat() * s.mat() * xinv.mat();
    g = (0.5 * (g + g.transpose())).eval();
    if (pin_diagonal) g.diagonal().setZero();
    return g;
  };

  ProxResult out;
  const bool diag_free_or_matching = !pin_diagonal || init.diag() == s.diag();
  if (w.all_offdiag_zero() && diag_free_or_matching && is_positive_definite(s)) {
    // Unpenalized: S is the stationary point.
    out.sigma = s;
    out.objective_trace = {smooth(init, inverse(init)), smooth(s, inverse(s))};
    out.converged = true;
    return out;
  }
  SymMatrix x = init;
  SymMatrix xinv = inverse(x);
  double f = smooth(x, xinv);
  double obj = f + offdiag_penalty(x.mat(), w);
  out.objective_trace.push_back(obj);
  Eigen::MatrixXd grad = gradient(xinv);

  const double gnorm = grad.norm();
  // The curvature of the smooth part scales like |Sigma|^-2, so no first
  // step longer than |Sigma|^2 is useful.
  const double xnorm0 = x.mat().norm();
  double step = gnorm > 0.0 ? std::min(1.0 / gnorm, xnorm0 * xnorm0) : 1.0;
  constexpr int kMaxBacktracks = 80;
  std::vector<int> pattern = offdiag_pattern(x, w);
  int next_retry = 0;
  int retry_gap = 8;

  for (int it = 1; it <= opts.max_sweeps; ++it) {
    bool accepted = false;
    SymMatrix next;
    SymMatrix next_inv;
    double next_f = 0.0;
    double next_obj = 0.0;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      Eigen::MatrixXd y = x.mat() - step * grad;
      for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < p; ++i) {
          if (i != j) y(i, j) = soft_threshold(y(i, j), step * w(i, j));
        }
      }
      if (pin_diagonal) y.diagonal() = x.mat().diagonal();
      SymMatrix cand(y);
      if (!is_positive_definite(cand)) {
        step *= opts.pd_backtrack;
        continue;
      }
      SymMatrix cand_inv = inverse(cand);
      const double cand_f = smooth(cand, cand_inv);
      const Eigen::MatrixXd d = cand.mat() - x.mat();
      const double model = f + grad.cwiseProduct(d).sum() + d.squaredNorm() / (2.0 * step);
      const double cand_obj = cand_f + offdiag_penalty(cand.mat(), w);
      if (std::isfinite(cand_f) && cand_f <= model && cand_obj <= obj) {
        next = std::move(cand);
        next_inv = std::move(cand_inv);
        next_f = cand_f;
        next_obj = cand_obj;
        accepted = true;
        break;
      }
      step *= opts.pd_backtrack;
    }
    out.iterations = it;
    if (!accepted) {
      // No descent step exists at machine precision: x is stationary.
      out.converged = true;
      break;
    }

    const double prev_step = step;
    const Eigen::MatrixXd d = next.mat() - x.mat();
    const Eigen::MatrixXd next_grad = gradient(next_inv);
    const double change = d.norm();
    const double xnorm = x.mat().norm();

    // Barzilai-Borwein trial step for the next iteration.
    const double sy = d.cwiseProduct(next_grad - grad).sum();
    const double ss = d.squaredNorm();
    if (sy > 0.0 && ss > 0.0) {
      step = std::clamp(ss / sy, 1e-12, 1e12);
    } else {
      step = std::min(step * 2.0, 1e12);
    }

    x = std::move(next);
    xinv = std::move(next_inv);
    f = next_f;
    obj = next_obj;
    grad = next_grad;
    out.objective_trace.push_back(obj);

    // Gradient-mapping norm, made scale free by |Sigma|.
    if (change <= opts.tol * xnorm && change * xnorm <= opts.tol * prev_step) {
      out.converged = true;
      break;
    }
    std::vector<int> now = offdiag_pattern(x, w);
    if (now == pattern && it >= next_retry) {
      const Polish status = polish_fixed_signs(Param::Covariance, s, w, now, pin_diagonal, x, obj);
      if (status != Polish::Failed) {
        xinv = inverse(x);
        f = smooth(x, xinv);
        grad = gradient(xinv);
        out.objective_trace.push_back(obj);
      }
      if (status == Polish::Solved) {
        out.converged = true;
        break;
      }
      next_retry = it + retry_gap;
      retry_gap *= 2;
    }
    pattern = std::move(now);
  }
  out.sigma = x;
  return out;
}

}  // namespace sparsecov
