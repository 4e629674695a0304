#include <benchmark/benchmark.h>

#include <vector>

#include "sdenum/harness.hpp"
#include "sdenum/philox.hpp"
#include "sdenum/problems.hpp"
#include "sdenum/schemes.hpp"
#include "sdenum/wiener.hpp"

using namespace sdenum;

namespace {

void BM_PhiloxNormal(benchmark::State& state) {
  const rng::Key key = rng::make_key(42);
  std::uint64_t step = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rng::normal(key, 7, step++, 0, rng::kDomainTest));
  }
}
BENCHMARK(BM_PhiloxNormal);

void BM_GeneratePath(benchmark::State& state) {
  const int level = static_cast<int>(state.range(0));
  std::uint64_t path = 0;
  for (auto _ : state) {
    const auto grid = WienerGrid::generate(42, path++, 1, 0.0, 1.0, level);
    benchmark::DoNotOptimize(grid.fine_increment(0, 0));
  }
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << level));
}
BENCHMARK(BM_GeneratePath)->Arg(10)->Arg(14);

void BM_CoarseIncrement(benchmark::State& state) {
  const auto grid = WienerGrid::generate(42, 3, 2, 0.0, 1.0, 14);
  std::vector<double> dw(2), xi(2);
  std::size_t k = 0;
  for (auto _ : state) {
    grid.coarse_increment(6, k, dw, xi);
    benchmark::DoNotOptimize(dw[0]);
    k = (k + 1) % grid.steps_at(6);
  }
}
BENCHMARK(BM_CoarseIncrement);

void BM_DoubleIto(benchmark::State& state) {
  const auto grid = WienerGrid::generate(42, 3, 2, 0.0, 1.0, 14);
  std::vector<double> ito(4);
  std::size_t k = 0;
  for (auto _ : state) {
    grid.double_ito(6, k, ito);
    benchmark::DoNotOptimize(ito[1]);
    k = (k + 1) % grid.steps_at(6);
  }
}
BENCHMARK(BM_DoubleIto);

void BM_BalancedEulerStep(benchmark::State& state) {
  const auto sys = make_three_halves(4.0, 1.0, 1.0);
  StepScratch ws(1, 1);
  std::vector<double> x = {1.0}, xi = {0.7}, out(1);
  const StepInputs in{0.0, x, 1.0 / 256.0, xi, {}};
  for (auto _ : state) {
    balanced_euler_step(sys, in, ws, out);
    benchmark::DoNotOptimize(out[0]);
  }
}
BENCHMARK(BM_BalancedEulerStep);

void BM_BalancedMilsteinCommutativeStep(benchmark::State& state) {
  const auto sys = make_three_halves(4.0, 1.0, 1.0);
  StepScratch ws(1, 1);
  std::vector<double> x = {1.0}, xi = {0.7}, out(1);
  const StepInputs in{0.0, x, 1.0 / 256.0, xi, {}};
  for (auto _ : state) {
    balanced_milstein_commutative_step(sys, in, ws, out);
    benchmark::DoNotOptimize(out[0]);
  }
}
BENCHMARK(BM_BalancedMilsteinCommutativeStep);

void BM_IntegratePath(benchmark::State& state) {
  const auto sys = make_three_halves(4.0, 1.0, 1.0);
  const auto grid = WienerGrid::generate(42, 3, 1, 0.0, 1.0, 12);
  std::vector<double> x0 = {1.0};
  SchemeSpec spec;
  spec.kind = SchemeKind::BalancedEuler;
  for (auto _ : state) {
    const auto traj = integrate(sys, spec, grid, 12, x0);
    benchmark::DoNotOptimize(traj.terminal()[0]);
  }
  state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(BM_IntegratePath);

void BM_SmallConvergenceStudy(benchmark::State& state) {
  const auto sys = make_gbm(0.05, 0.2);
  SchemeSpec spec;
  spec.kind = SchemeKind::BalancedEuler;
  SimConfig cfg;
  cfg.t0 = 0.0;
  cfg.T = 1.0;
  cfg.initial_state = {1.0};
  cfg.fine_level = 10;
  cfg.coarse_levels = {4, 5, 6};
  cfg.num_paths = 64;
  cfg.seed = 9;
  for (auto _ : state) {
    const auto rep = convergence_study(sys, spec, cfg, 1);
    benchmark::DoNotOptimize(rep.fitted_order);
  }
}
BENCHMARK(BM_SmallConvergenceStudy);

}  // namespace

BENCHMARK_MAIN();
