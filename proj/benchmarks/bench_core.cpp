#include <benchmark/benchmark.h>

#include "magnls/solver.hpp"

using namespace magnls;

namespace {

ReducedContext make_context(int n, double eps = 0.1) {
  HalfPlaneGrid grid;
  grid.n_rho = grid.n_x3 = n;
  return ReducedContext(eps, grid, CylMagneticPotential::constant_field(1.0),
                        ScalarPotential::cylindrical_hardy(1.0, 2.0),
                        PenalizationParams{}, ConcentrationDomain{0.5, 2.0, 0.5},
                        4.0);
}

void BM_ShootingGroundState(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_limit_ground_state(1.0, 4.0).energy);
  }
}
BENCHMARK(BM_ShootingGroundState)->Unit(benchmark::kMillisecond);

void BM_PenalizedGradient(benchmark::State& state) {
  const ReducedContext ctx = make_context(int(state.range(0)));
  const ComplexField u = make_init_guess(ctx, 1.07, 0.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(penalized_gradient(ctx, u).values.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PenalizedGradient)->Arg(64)->Arg(128)->Arg(256)->Complexity();

void BM_EnergyNorm(benchmark::State& state) {
  const ReducedContext ctx = make_context(int(state.range(0)));
  const ComplexField u = make_init_guess(ctx, 1.07, 0.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(energy_norm(ctx, u));
  }
}
BENCHMARK(BM_EnergyNorm)->Arg(128)->Arg(256);

void BM_NehariProjection(benchmark::State& state) {
  const ReducedContext ctx = make_context(128);
  const ComplexField u = make_init_guess(ctx, 1.07, 0.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nehari_scale(ctx, u));
  }
}
BENCHMARK(BM_NehariProjection);

}  // namespace

BENCHMARK_MAIN();
