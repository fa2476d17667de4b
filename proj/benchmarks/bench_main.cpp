#include <benchmark/benchmark.h>

#include "absaga/algorithms.hpp"
#include "absaga/digraph.hpp"
#include "absaga/problems.hpp"
#include "absaga/theory.hpp"
#include "absaga/weights.hpp"

namespace {

using namespace absaga;

void BM_AbsagaStep(benchmark::State& state) {
  auto graph = exponential_graph(16);
  WeightSystem weights(graph);
  auto problem = synthetic_logistic(16, 100, 10, 1, 0.01);
  EngineOptions opts;
  opts.alpha = 0.2;
  DecentralizedEngine engine(problem, weights, Method::absaga, opts);
  for (auto _ : state) {
    engine.step();
    benchmark::DoNotOptimize(engine.state().x.data());
  }
}
BENCHMARK(BM_AbsagaStep);

void BM_AbStep(benchmark::State& state) {
  auto graph = exponential_graph(16);
  WeightSystem weights(graph);
  auto problem = synthetic_logistic(16, 100, 10, 1, 0.01);
  EngineOptions opts;
  opts.alpha = 0.2;
  DecentralizedEngine engine(problem, weights, Method::ab, opts);
  for (auto _ : state) {
    engine.step();
    benchmark::DoNotOptimize(engine.state().x.data());
  }
}
BENCHMARK(BM_AbStep);

void BM_WeightSystemBuild(benchmark::State& state) {
  auto graph = exponential_graph(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    WeightSystem weights(graph);
    benchmark::DoNotOptimize(weights.sigma_a());
  }
}
BENCHMARK(BM_WeightSystemBuild)->Arg(16)->Arg(64)->Arg(128);

void BM_SpectralRadius4x4(benchmark::State& state) {
  auto graph = exponential_graph(16);
  WeightSystem weights(graph);
  auto inputs = theory::ConvergenceInputs::from(weights, {0.35, 0.1, 3.5}, 100, 100,
                                                2.8e-3, 33, 25);
  Eigen::Matrix4d g = theory::build_G(inputs);
  for (auto _ : state) {
    auto result = theory::spectral_radius(g);
    benchmark::DoNotOptimize(result.rho);
  }
}
BENCHMARK(BM_SpectralRadius4x4);

void BM_LogisticLocalGradient(benchmark::State& state) {
  auto problem = synthetic_logistic(1, 1000, 50, 3, 0.01);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(50, 0.1);
  Eigen::VectorXd out(50);
  for (auto _ : state) {
    problem.local_full_gradient_into(x, 0, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_LogisticLocalGradient);

}  // namespace

BENCHMARK_MAIN();
