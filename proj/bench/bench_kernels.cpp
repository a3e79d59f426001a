// Serial reference versus OpenMP kernels, plus the replicate loop.
#include <benchmark/benchmark.h>

#include <random>

#include "sparsecov/kernels.hpp"
#include "sparsecov/simulation.hpp"

namespace {

using namespace sparsecov;
using namespace sparsecov::kernels;

Eigen::MatrixXd random_table(Eigen::Index rows, Eigen::Index cols) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> z;
  Eigen::MatrixXd x(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) x(i, j) = z(rng);
  return x;
}

void BM_CrossprodSerial(benchmark::State& state) {
  const Eigen::MatrixXd x = random_table(2000, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(crossprod_serial(x, 2000.0));
}
void BM_CrossprodOmp(benchmark::State& state) {
  const Eigen::MatrixXd x = random_table(2000, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(crossprod_omp(x, 2000.0));
}
BENCHMARK(BM_CrossprodSerial)->Arg(50)->Arg(200);
BENCHMARK(BM_CrossprodOmp)->Arg(50)->Arg(200);

void BM_ColumnMeansSerial(benchmark::State& state) {
  const Eigen::MatrixXd x = random_table(20000, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(column_means_serial(x));
}
void BM_ColumnMeansOmp(benchmark::State& state) {
  const Eigen::MatrixXd x = random_table(20000, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(column_means_omp(x));
}
BENCHMARK(BM_ColumnMeansSerial)->Arg(100);
BENCHMARK(BM_ColumnMeansOmp)->Arg(100);

Eigen::MatrixXd lower_factor(Eigen::Index p) {
  Eigen::MatrixXd a = random_table(p, p);
  Eigen::MatrixXd spd = a * a.transpose() + static_cast<double>(p) * Eigen::MatrixXd::Identity(p, p);
  return spd.llt().matrixL();
}

void BM_LowerTransformSerial(benchmark::State& state) {
  const Eigen::MatrixXd z = random_table(2000, state.range(0));
  const Eigen::MatrixXd l = lower_factor(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lower_transform_serial(z, l));
}
void BM_LowerTransformOmp(benchmark::State& state) {
  const Eigen::MatrixXd z = random_table(2000, state.range(0));
  const Eigen::MatrixXd l = lower_factor(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lower_transform_omp(z, l));
}
BENCHMARK(BM_LowerTransformSerial)->Arg(100);
BENCHMARK(BM_LowerTransformOmp)->Arg(100);

RateExperiment small_experiment() {
  RateExperiment exp;
  exp.truth = {TruthKind::TridiagonalPrecision, 20, 0.4, 0.0, 0};
  exp.p_values = {20};
  exp.n_values = {200, 400};
  exp.replicates = 8;
  exp.estimator.target = Target::Precision;
  exp.estimator.penalty = Penalty::scad(0.1);
  exp.lambda_rule = LambdaRule::OracleScale;
  exp.seed = 9;
  return exp;
}

void BM_ReplicatesSerial(benchmark::State& state) {
  const RateExperiment exp = small_experiment();
  for (auto _ : state) benchmark::DoNotOptimize(run_rate_experiment_serial(exp));
}
void BM_ReplicatesOmp(benchmark::State& state) {
  const RateExperiment exp = small_experiment();
  for (auto _ : state) benchmark::DoNotOptimize(run_rate_experiment(exp));
}
BENCHMARK(BM_ReplicatesSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReplicatesOmp)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
