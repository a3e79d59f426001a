// sparsecov: penalized-likelihood estimation of sparse precision, covariance,
// correlation and Cholesky-factor matrices from the command line.
//
//   sparsecov estimate --target precision --penalty scad:0.2:3.7 --in data.csv --out est.json
//   sparsecov select   --target precision --penalty scad:0.1 --grid 0.01:1:20 --in data.csv --out best.json
//   sparsecov simulate --truth tridiag:0.4 --p 30 --n 400 --seed 7 --out data.csv
//   sparsecov rates    --truth tridiag:0.4 --p-values 50 --n-values 100,200,400,800 --out results/
//
// Exit codes: 0 success, 1 input or precondition error, 2 solver did not converge
// (the result is still written, with "converged": false).

#include <CLI11.hpp>
#include <omp.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sparsecov/csv.hpp"
#include "sparsecov/estimators.hpp"
#include "sparsecov/report_io.hpp"
#include "sparsecov/simulation.hpp"
#include "sparsecov/tuning.hpp"

namespace fs = std::filesystem;
using namespace sparsecov;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNonConvergence = 2;

struct SolverFlags {
  double tol = SolverOptions{}.tol;
  int max_sweeps = SolverOptions{}.max_sweeps;
  int lla_iters = 3;
};

void add_solver_flags(CLI::App* cmd, SolverFlags& flags) {
  cmd->add_option("--tol", flags.tol, "Relative solver tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--max-sweeps", flags.max_sweeps, "Sweep / iteration cap for the inner solvers")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--lla-iters", flags.lla_iters, "Local linear approximation steps")->check(CLI::PositiveNumber);
}

EstimatorConfig make_config(const std::string& target, const std::string& penalty, const SolverFlags& flags) {
  EstimatorConfig cfg;
  cfg.target = parse_target(target);
  cfg.penalty = parse_penalty(penalty);
  cfg.lla_iters = flags.lla_iters;
  cfg.solver.tol = flags.tol;
  cfg.solver.max_sweeps = flags.max_sweeps;
  cfg.validate();
  return cfg;
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 3) throw InvalidInput("grid must be lo:hi:k");
  try {
    return LambdaGrid::log_spaced(std::stod(parts[0]), std::stod(parts[1]), std::stoi(parts[2])).values();
  } catch (const std::logic_error&) {
    throw InvalidInput("grid must be lo:hi:k");
  }
}

template <typename T>
std::vector<T> parse_list(const std::string& spec, const char* what) {
  std::vector<T> out;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(static_cast<T>(v));
    } catch (const std::logic_error&) {
      throw InvalidInput(std::string("cannot parse ") + what + " list '" + spec + "'");
    }
  }
  if (out.empty()) throw InvalidInput(std::string("empty ") + what + " list");
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text;
  if (!out) throw InvalidInput("failed writing " + path);
}

SymMatrix load_covariance(const std::string& path, bool center) {
  const DataTable table = read_csv_file(path);
  return sample_covariance(table.values, center);
}

int cmd_estimate(const std::string& in, const std::string& out, const EstimatorConfig& cfg, bool center) {
  const SymMatrix s = load_covariance(in, center);
  const EstimationResult result = estimate(s, cfg);
  write_text(out, result_to_json(result, cfg.penalty).dump(2) + "\n");
  if (!result.converged) {
    std::cerr << "warning: solver reached its iteration cap before converging\n";
    return kExitNonConvergence;
  }
  return kExitOk;
}

int cmd_select(const std::string& in, const std::string& out, const std::string& table_path,
               const std::string& grid_spec, const EstimatorConfig& cfg, bool center) {
  const DataTable data = read_csv_file(in);
  const SymMatrix s = sample_covariance(data.values, center);
  const Index n = data.values.rows();
  const LambdaGrid grid = grid_spec.empty() ? LambdaGrid::default_for(s.dim(), n) : LambdaGrid(parse_grid(grid_spec));
  const Selection sel = select_lambda(s, n, grid, cfg);

  std::ostringstream csv;
  write_selection_csv(csv, sel);
  if (!table_path.empty()) {
    write_text(table_path, csv.str());
  } else {
    std::cout << csv.str();
  }
  write_text(out, result_to_json(sel.best, cfg.penalty.with_lambda(sel.best_lambda)).dump(2) + "\n");
  std::cout << "selected lambda " << sel.best_lambda << "\n";
  return sel.best.converged ? kExitOk : kExitNonConvergence;
}

int cmd_simulate(const std::string& truth_spec, Index p, Index n, std::uint64_t seed, const std::string& out,
                 const std::string& truth_out) {
  const Truth truth = gen_truth(parse_truth(truth_spec, p, seed));
  const Eigen::MatrixXd data = sample_gaussian(truth.sigma, n, mix_seed(seed, {static_cast<std::uint64_t>(n)}));
  std::vector<std::string> header;
  for (Index j = 0; j < p; ++j) header.push_back("x" + std::to_string(j + 1));
  std::ostringstream csv;
  write_csv(csv, data, header);
  write_text(out, csv.str());
  if (!truth_out.empty()) {
    nlohmann::json j;
    j["truth"] = truth_spec;
    j["p"] = p;
    j["seed"] = seed;
    std::vector<double> sigma(truth.sigma.mat().size()), omega(truth.omega.mat().size());
    for (Index i = 0; i < p; ++i) {
      for (Index k = 0; k < p; ++k) {
        sigma[static_cast<std::size_t>(i * p + k)] = truth.sigma(i, k);
        omega[static_cast<std::size_t>(i * p + k)] = truth.omega(i, k);
      }
    }
    j["sigma"] = sigma;
    j["omega"] = omega;
    j["tau_min"] = truth.tau_min;
    j["tau_max"] = truth.tau_max;
    write_text(truth_out, j.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_rates(const RateExperiment& exp, const std::string& out_dir) {
  if (!fs::is_directory(out_dir)) throw InvalidInput("output directory does not exist: " + out_dir);
  const RateReport report = run_rate_experiment(exp);
  std::ostringstream csv;
  write_rate_csv(csv, report);
  write_text((fs::path(out_dir) / "rates.csv").string(), csv.str());
  write_text((fs::path(out_dir) / "rates_summary.json").string(), rate_summary_json(report, exp).dump(2) + "\n");
  std::cout << "slope vs log((p+s) log p / n): " << report.slope_rate << " (se " << report.slope_rate_se << ")\n";
  std::cout << "slope vs log n: " << report.slope_n << " (se " << report.slope_n_se << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Penalized-likelihood estimation of sparse covariance-type matrices"};
  app.require_subcommand(1);

  int workers = 0;
  app.add_option("--workers", workers, "OpenMP worker threads (default: available parallelism)")
      ->check(CLI::NonNegativeNumber);

  const std::string target_help =
      "precision|covariance|correlation|inverse-correlation|cholesky-ml|cholesky-ls|cholesky-nl";

  // estimate
  std::string est_target = "precision", est_penalty = "scad:0.1:3.7", est_in, est_out;
  double est_lambda = -1.0;
  bool est_no_center = false;
  SolverFlags est_flags;
  auto* estimate_cmd = app.add_subcommand("estimate", "Fit one estimator at a fixed lambda");
  estimate_cmd->add_option("--target", est_target, target_help);
  estimate_cmd->add_option("--penalty", est_penalty, "l1:LAMBDA | scad:LAMBDA[:A] | hard:LAMBDA");
  estimate_cmd->add_option("--lambda", est_lambda, "Override the lambda in --penalty");
  estimate_cmd->add_option("--in", est_in, "Input CSV, one observation per row")->required();
  estimate_cmd->add_option("--out", est_out, "Output JSON path")->required();
  estimate_cmd->add_flag("--no-center", est_no_center, "Do not subtract column means");
  add_solver_flags(estimate_cmd, est_flags);

  // select
  std::string sel_target = "precision", sel_penalty = "scad:0.1:3.7", sel_in, sel_out, sel_table, sel_grid;
  bool sel_no_center = false;
  SolverFlags sel_flags;
  auto* select_cmd = app.add_subcommand("select", "Choose lambda by BIC over a grid");
  select_cmd->add_option("--target", sel_target, target_help);
  select_cmd->add_option("--penalty", sel_penalty, "Penalty family and shape; its lambda is replaced by the grid");
  select_cmd->add_option("--grid", sel_grid, "lo:hi:k log-spaced lambda grid (default: 20 values scaled by sqrt(log p/n))");
  select_cmd->add_option("--in", sel_in, "Input CSV")->required();
  select_cmd->add_option("--out", sel_out, "Output JSON for the selected model")->required();
  select_cmd->add_option("--table", sel_table, "Per-lambda CSV table (default: stdout)");
  select_cmd->add_flag("--no-center", sel_no_center, "Do not subtract column means");
  add_solver_flags(select_cmd, sel_flags);

  // simulate
  std::string sim_truth = "tridiag:0.4", sim_out, sim_truth_out;
  Index sim_p = 10, sim_n = 100;
  std::uint64_t sim_seed = 0;
  auto* simulate_cmd = app.add_subcommand("simulate", "Draw a Gaussian sample from a synthetic truth");
  simulate_cmd->add_option("--truth", sim_truth, "tridiag:V | tridiag-cov:V | ar1:PHI | sparse:DENSITY:MAG");
  simulate_cmd->add_option("--p", sim_p, "Dimension")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--n", sim_n, "Sample size")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seed", sim_seed, "Random seed");
  simulate_cmd->add_option("--out", sim_out, "Output data CSV")->required();
  simulate_cmd->add_option("--truth-out", sim_truth_out, "Optional JSON with the true Sigma and Omega");

  // rates
  std::string rate_truth = "tridiag:0.4", rate_target = "precision", rate_penalty = "scad:0:3.7";
  std::string rate_p = "50", rate_n = "100,200,400,800", rate_out, rate_grid;
  int rate_reps = 30;
  double rate_scale = 1.0;
  std::uint64_t rate_seed = 0;
  SolverFlags rate_flags;
  auto* rates_cmd = app.add_subcommand("rates", "Monte Carlo rate-of-convergence experiment");
  rates_cmd->add_option("--truth", rate_truth, "tridiag:V | tridiag-cov:V | ar1:PHI | sparse:DENSITY:MAG");
  rates_cmd->add_option("--target", rate_target, target_help);
  rates_cmd->add_option("--penalty", rate_penalty, "Penalty family and shape; lambda comes from the scale rule");
  rates_cmd->add_option("--p-values", rate_p, "Comma-separated dimensions");
  rates_cmd->add_option("--n-values", rate_n, "Comma-separated sample sizes");
  rates_cmd->add_option("--replicates", rate_reps, "Replicates per cell")->check(CLI::PositiveNumber);
  rates_cmd->add_option("--lambda-scale", rate_scale, "lambda = c * sqrt(log p / n)");
  rates_cmd->add_option("--grid", rate_grid, "lo:hi:k grid of c values; selects lambda by BIC instead");
  rates_cmd->add_option("--seed", rate_seed, "Experiment seed");
  rates_cmd->add_option("--out", rate_out, "Existing output directory")->required();
  add_solver_flags(rates_cmd, rate_flags);

  CLI11_PARSE(app, argc, argv);

  if (workers > 0) omp_set_num_threads(workers);

  try {
    if (*estimate_cmd) {
      EstimatorConfig cfg = make_config(est_target, est_penalty, est_flags);
      if (est_lambda >= 0.0) cfg.penalty = cfg.penalty.with_lambda(est_lambda);
      return cmd_estimate(est_in, est_out, cfg, !est_no_center);
    }
    if (*select_cmd) {
      return cmd_select(sel_in, sel_out, sel_table, sel_grid, make_config(sel_target, sel_penalty, sel_flags),
                        !sel_no_center);
    }
    if (*simulate_cmd) return cmd_simulate(sim_truth, sim_p, sim_n, sim_seed, sim_out, sim_truth_out);
    if (*rates_cmd) {
      RateExperiment exp;
      exp.truth = parse_truth(rate_truth, 2, rate_seed);
      exp.p_values = parse_list<Index>(rate_p, "p");
      exp.n_values = parse_list<Index>(rate_n, "n");
      exp.replicates = rate_reps;
      exp.estimator = make_config(rate_target, rate_penalty, rate_flags);
      exp.lambda_scale = rate_scale;
      exp.seed = rate_seed;
      if (!rate_grid.empty()) {
        exp.lambda_rule = LambdaRule::Bic;
        exp.grid_scales = parse_grid(rate_grid);
      }
      return cmd_rates(exp, rate_out);
    }
  } catch (const NonConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
