#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

#include "oswr/analysis.hpp"
#include "oswr/oswr.hpp"

using namespace oswr;

namespace {

ExperimentConfig decay() {
  ExperimentConfig cfg = load_config(std::filesystem::path(OSWR_CONFIG_DIR) / "decay.cfg");
  cfg.u0 = Expression();
  cfg.f = Expression();
  return cfg;
}

void BM_ProjectionBuild(benchmark::State &state) {
  const int n = static_cast<int>(state.range(0));
  const auto source = TimePartition::uniform(0.0, 1.0, n);
  const auto target = TimePartition::uniform(0.0, 1.0, 3 * n / 4 + 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_projection_matrices(source, target, 1));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_ProjectionBuild)->RangeMultiplier(4)->Range(16, 4096)->Complexity(benchmark::oN);

void BM_AssembleAtilde(benchmark::State &state) {
  const int n = static_cast<int>(state.range(0));
  const FemSpace space = make_space(build_mesh(Box{2, 0.0, 1.0, 0.0, 1.0}, n, n));
  Coefficients k;
  k.nu = Expression::parse("0.1 + 0.05*x");
  k.bx = Expression::constant(0.2);
  k.by = Expression::constant(0.1);
  k.c = Expression::constant(0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_atilde(space, k));
  }
  state.SetComplexityN(static_cast<int64_t>(n) * n);
}
BENCHMARK(BM_AssembleAtilde)->RangeMultiplier(2)->Range(16, 128)->Complexity(benchmark::oN);

void BM_StepD1(benchmark::State &state) {
  const int n = static_cast<int>(state.range(0));
  const FemSpace space = make_space(build_mesh(Box{2, 0.0, 1.0, 0.0, 1.0}, n, n));
  Coefficients k;
  k.nu = Expression::constant(0.1);
  const SparseMatrix M = assemble_mass(space, Expression::constant(1.0));
  const SparseMatrix A = assemble_atilde(space, k);
  const Eigen::VectorXd u = Eigen::VectorXd::Ones(M.rows());
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(M.rows());
  for (auto _ : state) {
    benchmark::DoNotOptimize(step_d1(M, A, u, 0.01, z, z, z, z));
  }
}
BENCHMARK(BM_StepD1)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_OswrIteration(benchmark::State &state) {
  const ExperimentConfig cfg = decay();
  MultidomainProblem problem(cfg);
  std::mt19937_64 rng(7);
  std::vector<Eigen::VectorXd> u;
  std::vector<TraceMap> g;
  for (std::size_t s = 0; s < problem.size(); ++s) {
    u.push_back(problem.initial_value(s));
    g.push_back(random_traces(problem.operators(s), problem.window_partition(s, 0), rng));
  }
  IterateOptions opt;
  opt.max_iterations = 1;
  opt.tolerance = 0.0;
  opt.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(iterate(problem, 0, u, g, opt));
  }
}
BENCHMARK(BM_OswrIteration)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
