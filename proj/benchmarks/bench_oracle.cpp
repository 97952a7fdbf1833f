#include "minimax/oracle.hpp"
#include "minimax/problems.hpp"
#include "minimax/rng.hpp"

#include <benchmark/benchmark.h>

using namespace minimax;

namespace {

RobustRegressionOracle make_oracle(Eigen::Index d, Eigen::Index n) {
  SeededRng rng(1);
  return RobustRegressionOracle(gen_synthetic(rng, d, n, 0.1, 10.0));
}

void BM_MeritValue(benchmark::State& state) {
  const auto oracle = make_oracle(state.range(0), state.range(0) * 3 / 2);
  RegularizedObjective reg(oracle, 2.0 / oracle.problem().mu());
  SeededRng rng(2);
  const Vec x = standard_normal_vector(rng, oracle.dim_x());
  const Vec y = standard_normal_vector(rng, oracle.dim_y());
  for (auto _ : state) benchmark::DoNotOptimize(reg.value_bundle(x, y));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MeritValue)->RangeMultiplier(2)->Range(32, 256)->Complexity();

void BM_MeritGradient(benchmark::State& state) {
  const auto oracle = make_oracle(state.range(0), state.range(0) * 3 / 2);
  RegularizedObjective reg(oracle, 2.0 / oracle.problem().mu());
  SeededRng rng(2);
  const Vec x = standard_normal_vector(rng, oracle.dim_x());
  const Vec y = standard_normal_vector(rng, oracle.dim_y());
  for (auto _ : state) benchmark::DoNotOptimize(reg.grad(x, y));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MeritGradient)->RangeMultiplier(2)->Range(32, 256)->Complexity();

void BM_SecondOrderAction(benchmark::State& state) {
  const auto oracle = make_oracle(state.range(0), state.range(0) * 3 / 2);
  SeededRng rng(2);
  const Vec x = standard_normal_vector(rng, oracle.dim_x());
  const Vec y = standard_normal_vector(rng, oracle.dim_y());
  const Vec v = standard_normal_vector(rng, oracle.dim_y());
  for (auto _ : state) benchmark::DoNotOptimize(oracle.y_dir_second(x, y, v));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SecondOrderAction)
    ->RangeMultiplier(2)
    ->Range(32, 256)
    ->Complexity();

}  // namespace
