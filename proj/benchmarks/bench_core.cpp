#include <benchmark/benchmark.h>

#include "lowrank/integrators.hpp"
#include "lowrank/linalg.hpp"
#include "lowrank/problems.hpp"
#include "lowrank/rng.hpp"

using lowrank::Index;
using lowrank::Matrix;

static void BM_QrThin(benchmark::State& state) {
  const Matrix a = lowrank::random_uniform_matrix(state.range(0), 10, 1);
  for (auto _ : state) {
    auto qr = lowrank::qr_thin(a);
    benchmark::DoNotOptimize(qr.q.data());
  }
}
BENCHMARK(BM_QrThin)->Arg(100)->Arg(400);

static void BM_TruncatedSvd(benchmark::State& state) {
  const Matrix a = lowrank::random_uniform_matrix(state.range(0), state.range(0), 2);
  for (auto _ : state) {
    auto z = lowrank::truncated_svd(a, 10);
    benchmark::DoNotOptimize(z.g.data());
  }
}
BENCHMARK(BM_TruncatedSvd)->Arg(100);

static void BM_MatrixExp(benchmark::State& state) {
  const Matrix w = lowrank::random_skew_symmetric(state.range(0), 3);
  for (auto _ : state) {
    Matrix e = lowrank::matrix_exp(w);
    benchmark::DoNotOptimize(e.data());
  }
}
BENCHMARK(BM_MatrixExp)->Arg(100);

static void BM_SplittingStep(benchmark::State& state) {
  const Index n = 100, r = state.range(0);
  const Matrix c = lowrank::random_uniform_matrix(n, n, 4);
  lowrank::FluxField flux;
  flux.eval = [&](const Matrix&, double) { return c; };
  const auto z0 = lowrank::initial_state(lowrank::random_uniform_matrix(n, n, 5), r);
  const bool chart = state.range(1) != 0;
  for (auto _ : state) {
    auto z1 = chart ? lowrank::chart_step(z0, flux, 0.0, 1e-3)
                    : lowrank::ksl_step(z0, flux, 0.0, 1e-3);
    benchmark::DoNotOptimize(z1.g.data());
  }
}
BENCHMARK(BM_SplittingStep)->Args({10, 0})->Args({10, 1})->Args({32, 0})->Args({32, 1});

static void BM_BurgersFlux(benchmark::State& state) {
  lowrank::BurgersConfig cfg;
  cfg.n = 100;
  cfg.m = 60;
  const auto problem = lowrank::burgers_problem(cfg);
  const Matrix x = lowrank::random_uniform_matrix(cfg.n, cfg.m, 6);
  for (auto _ : state) {
    Matrix f = problem.flux.eval(x, 0.37);
    benchmark::DoNotOptimize(f.data());
  }
}
BENCHMARK(BM_BurgersFlux);

BENCHMARK_MAIN();
