#include "sparsecov/report_io.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace sparsecov {
namespace {

nlohmann::json row_major(const Eigen::MatrixXd& m) {
  nlohmann::json arr = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) arr.push_back(m(i, j));
  }
  return arr;
}

// JSON has no NaN; report missing fits as null.
nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

}  // namespace

nlohmann::json result_to_json(const EstimationResult& result, const Penalty& pen) {
  nlohmann::json j;
  j["target"] = target_name(result.target);
  j["p"] = result.estimate.dim();
  j["lambda"] = pen.lambda();
  j["penalty"] = to_string(pen);
  j["estimate"] = row_major(result.estimate.mat());
  nlohmann::json support = nlohmann::json::array();
  for (const auto& [a, b] : result.support) support.push_back({a, b});
  j["support_offdiag"] = support;
  j["objective_trace"] = result.objective_trace;
  j["converged"] = result.converged;
  j["sweeps_used"] = result.sweeps_used;
  if (result.companion) j["companion"] = row_major(result.companion->mat());
  if (result.cholesky_t) j["T"] = row_major(result.cholesky_t->mat());
  if (result.cholesky_d) {
    const Eigen::VectorXd& d = result.cholesky_d->values();
    j["D"] = std::vector<double>(d.data(), d.data() + d.size());
  }
  return j;
}

void write_selection_csv(std::ostream& out, const Selection& selection) {
  out << "lambda,bic,support_size,objective,converged\n";
  out << std::setprecision(17);
  for (const auto& row : selection.table) {
    out << row.lambda << "," << row.bic << "," << row.support_size << "," << row.objective << ","
        << (row.converged ? "true" : "false") << "\n";
  }
}

void write_rate_csv(std::ostream& out, const RateReport& report) {
  out << kRateCsvHeader << "\n";
  out << std::setprecision(17);
  for (const auto& c : report.cells) {
    out << c.n << "," << c.p << "," << c.s << "," << c.mean_sq_frobenius << "," << c.sd_sq_frobenius << ","
        << c.mean_sq_operator << "," << c.sd_sq_operator << "," << c.true_zero_rate << "," << c.true_nonzero_rate
        << "," << c.mean_lambda << "," << c.completed << "," << c.failures << "\n";
  }
}

nlohmann::json rate_summary_json(const RateReport& report, const RateExperiment& exp) {
  nlohmann::json j;
  j["truth"] = to_string(exp.truth);
  j["target"] = target_name(exp.estimator.target);
  j["penalty_family"] = family_name(exp.estimator.penalty.family());
  j["lambda_rule"] = exp.lambda_rule == LambdaRule::OracleScale ? "oracle-scale" : "bic";
  j["lambda_scale"] = exp.lambda_scale;
  j["replicates"] = exp.replicates;
  j["seed"] = exp.seed;
  j["n_values"] = exp.n_values;
  j["p_values"] = exp.p_values;
  j["slope_vs_rate"] = number_or_null(report.slope_rate);
  j["slope_vs_rate_se"] = number_or_null(report.slope_rate_se);
  j["slope_vs_log_n"] = number_or_null(report.slope_n);
  j["slope_vs_log_n_se"] = number_or_null(report.slope_n_se);
  int failures = 0;
  for (const auto& c : report.cells) failures += c.failures;
  j["failures"] = failures;
  return j;
}

}  // namespace sparsecov
