#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "smfg/diagnostics.hpp"
#include "smfg/flows.hpp"

namespace {

smfg::PeriodicGrid grid_of(int dim, int n) {
  return dim == 1 ? smfg::PeriodicGrid::line(n) : smfg::PeriodicGrid::square(n);
}

struct Instance {
  smfg::ProblemData data;
  smfg::GridFunction u;
  smfg::GridFunction m;
};

Instance make(int dim, int n) {
  const auto grid = grid_of(dim, n);
  std::mt19937_64 rng(1);
  auto V = smfg::random_fourier_field(grid, rng);
  auto u = smfg::random_fourier_field(grid, rng, 3, 0.3);
  auto m = smfg::random_fourier_field(grid, rng);
  for (double& v : m.values()) v = std::exp(v);
  if (dim == 1) {
    auto b = smfg::random_fourier_field(grid, rng, 2, 0.5);
    return {smfg::ProblemData(std::move(V), std::move(b)), std::move(u), std::move(m)};
  }
  return {smfg::ProblemData(std::move(V)), std::move(u), std::move(m)};
}

void BM_GApply(benchmark::State& state) {
  const auto in = make(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(smfg::g_apply(in.u, in.data));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(in.u.size()));
}

void BM_Adjoint(benchmark::State& state) {
  const auto in = make(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(smfg::adjoint_apply(in.u, in.m, in.data));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(in.u.size()));
}

void BM_GradientRhs(benchmark::State& state) {
  const auto in = make(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(smfg::gradient_rhs(in.u, in.data));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(in.u.size()));
}

void BM_MonotoneRhs(benchmark::State& state) {
  const auto in = make(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(smfg::monotonic_rhs(in.m, in.u, in.data));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(in.u.size()));
}

void BM_GradientFlowShort(benchmark::State& state) {
  const auto grid = smfg::PeriodicGrid::line(static_cast<int>(state.range(0)));
  const smfg::ProblemData data(smfg::GridFunction::sample(
      grid, [](double x) { return std::sin(2 * std::numbers::pi * x); }));
  const auto u0 = smfg::GridFunction::sample(
      grid, [](double x) { return 0.2 * std::cos(2 * std::numbers::pi * x); });
  smfg::FlowConfig cfg;
  cfg.t_max = 0.05;
  cfg.keep_snapshots = false;
  for (auto _ : state) benchmark::DoNotOptimize(smfg::solve_gradient_flow(data, u0, cfg));
}

}  // namespace

BENCHMARK(BM_GApply)->Args({1, 100})->Args({1, 1000})->Args({2, 20})->Args({2, 64});
BENCHMARK(BM_Adjoint)->Args({1, 100})->Args({1, 1000})->Args({2, 20})->Args({2, 64});
BENCHMARK(BM_GradientRhs)->Args({1, 100})->Args({1, 1000})->Args({2, 64});
BENCHMARK(BM_MonotoneRhs)->Args({1, 100})->Args({1, 1000})->Args({2, 64});
BENCHMARK(BM_GradientFlowShort)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
