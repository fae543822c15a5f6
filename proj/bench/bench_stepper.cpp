// Parallel step() against the serial step_reference() on a droplet state.
//   bench_stepper [--benchmark_filter=...]

#include <benchmark/benchmark.h>

#include <string>

#include "wettix/config.hpp"
#include "wettix/harness.hpp"

using namespace wettix;

namespace {

std::string droplet_config(int n) {
  return R"(
[grid]
n = )" + std::to_string(n) + R"(
[time]
T = 0.0008
dt = 0.0004
[tensions]
sigma_VL = sqrt_sin2(a=1, phase=pi/3)
sigma_LS = 1
sigma_VS = 1
[kernel]
mode = single
R = 0.5
q = 100
[shapes]
droplet = disc(center=(0.5, 0.5), r=0.2)
substrate = flat(h=0.5)
)";
}

struct Setup {
  LevelSetState state;
  StepParams params;
};

Setup make_setup(int n, int threads, bool banded) {
  const ExperimentConfig e = load_experiment(Config::parse(droplet_config(n)));
  const KernelTriple k = build_kernels(e);
  Setup s;
  s.params = make_step_params(e, k);
  s.params.threads = threads;
  if (!banded) s.params.band = NAN;
  s.state = make_droplet_state(e.droplet, e.substrate, Grid2D(e.n), e.area);
  return s;
}

// Every iteration steps a fresh copy, so all iterations do the same work.
void BM_step(benchmark::State& bs) {
  const Setup s = make_setup(int(bs.range(0)), int(bs.range(1)), bs.range(2) != 0);
  for (auto _ : bs) {
    bs.PauseTiming();
    LevelSetState st = s.state;
    bs.ResumeTiming();
    benchmark::DoNotOptimize(step(st, s.params));
  }
  bs.SetItemsProcessed(bs.iterations() * s.state.phi_L.grid.size());
}

void BM_step_reference(benchmark::State& bs) {
  const Setup s = make_setup(int(bs.range(0)), 1, bs.range(1) != 0);
  for (auto _ : bs) {
    bs.PauseTiming();
    LevelSetState st = s.state;
    bs.ResumeTiming();
    benchmark::DoNotOptimize(step_reference(st, s.params));
  }
  bs.SetItemsProcessed(bs.iterations() * s.state.phi_L.grid.size());
}

}  // namespace

// n, threads, banded
BENCHMARK(BM_step)
    ->ArgsProduct({{100, 200}, {1, 2, 4}, {0, 1}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
// n, banded
BENCHMARK(BM_step_reference)->ArgsProduct({{100, 200}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
