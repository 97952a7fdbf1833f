#include "minimax/problems.hpp"
#include "minimax/rng.hpp"
#include "minimax/solvers.hpp"

#include <benchmark/benchmark.h>

using namespace minimax;

namespace {

void BM_Alg2BbSyntheticRun(benchmark::State& state) {
  SeededRng rng(1);
  const Eigen::Index d = state.range(0);
  RobustRegressionOracle oracle(gen_synthetic(rng, d, d * 3 / 2, 0.1, 10.0));
  Alg2Params params;
  params.beta0 = 2.0 / oracle.problem().mu();
  params.beta_check_period = 0;
  StopRule stop;
  stop.grad_tol = 1e-7;
  stop.max_iters = 100000;
  const JointPoint z0(Vec::Zero(oracle.dim_x()), Vec::Zero(oracle.dim_y()));
  for (auto _ : state) {
    RunReport r = run_alg2(oracle, params, stop, z0);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_Alg2BbSyntheticRun)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_GdbbQuadraticRun(benchmark::State& state) {
  SeededRng rng(5);
  QuadraticOracle oracle(make_random_quadratic(rng, 10, 6));
  GdbbParams params;
  params.mu = oracle.problem().mu;
  StopRule stop;
  stop.grad_tol = 1e-9;
  stop.max_iters = 10000;
  const JointPoint z0(Vec::Zero(10), Vec::Zero(6));
  for (auto _ : state) {
    RunReport r = run_gdbb(oracle, params, stop, z0);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_GdbbQuadraticRun)->Unit(benchmark::kMicrosecond);

void BM_QuadraticSolution(benchmark::State& state) {
  SeededRng rng(7);
  const QuadraticNcsc q =
      make_random_quadratic(rng, state.range(0), state.range(0) / 2 + 1);
  for (auto _ : state) benchmark::DoNotOptimize(quadratic_solution(q));
}
BENCHMARK(BM_QuadraticSolution)->RangeMultiplier(2)->Range(4, 64);

}  // namespace

BENCHMARK_MAIN();
