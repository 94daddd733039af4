#include <benchmark/benchmark.h>

#include "mgmax/constants.hpp"
#include "mgmax/random_model.hpp"
#include "mgmax/rng.hpp"
#include "mgmax/stopping.hpp"

namespace {

using namespace mgmax;

// Full trees of the given depth and branching factor.
DyadicModel full_tree(std::size_t depth, std::size_t branch) {
  RandomModelParams params;
  params.depth_min = params.depth_max = depth;
  params.branch_min = params.branch_max = branch;
  params.split_probability = 1.0;
  return random_model(params, 42);
}

LeafValues random_f(std::size_t n) {
  Rng rng = substream(7, {n});
  LeafValues f(n);
  for (double& x : f) x = uniform01(rng);
  return f;
}

void BM_ApplyMaximal(benchmark::State& state) {
  const auto m = full_tree(static_cast<std::size_t>(state.range(0)), 3);
  const auto a = CoefficientFamily::constant(m, 1.0);
  const auto f = random_f(m.leaf_count());
  const Exponent q = state.range(1) ? Exponent::finite(2.0) : Exponent::infinity();
  for (auto _ : state) benchmark::DoNotOptimize(apply_maximal(m, a, f, q));
  state.counters["leaves"] = static_cast<double>(m.leaf_count());
}
BENCHMARK(BM_ApplyMaximal)->ArgsProduct({{2, 4, 6, 8}, {0, 1}});

void BM_TestingConstant(benchmark::State& state) {
  const auto m = full_tree(static_cast<std::size_t>(state.range(0)), 3);
  const auto a = CoefficientFamily::constant(m, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(testing_constant(m, a, 2.0, Exponent::finite(4.0)));
  state.counters["nodes"] = static_cast<double>(m.node_count());
}
BENCHMARK(BM_TestingConstant)->DenseRange(2, 6, 2);

void BM_BuildDecomposition(benchmark::State& state) {
  const auto m = full_tree(static_cast<std::size_t>(state.range(0)), 3);
  const auto f = random_f(m.leaf_count());
  for (auto _ : state) benchmark::DoNotOptimize(build_decomposition(m, f, 1.5));
  state.counters["nodes"] = static_cast<double>(m.node_count());
}
BENCHMARK(BM_BuildDecomposition)->DenseRange(2, 8, 2);

void BM_OperatorNormLower(benchmark::State& state) {
  const auto m = full_tree(3, 3);
  const auto a = CoefficientFamily::constant(m, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(operator_norm_lower(m, a, 2.0, Exponent::infinity()));
}
BENCHMARK(BM_OperatorNormLower);

}  // namespace
BENCHMARK_MAIN();
