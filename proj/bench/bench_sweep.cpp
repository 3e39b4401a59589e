// Serial reference vs OpenMP kernels.

#include "pwlstab/sphere_dynamics.hpp"
#include "pwlstab/sweep.hpp"

#include <benchmark/benchmark.h>

using namespace pwlstab;

namespace {

GridSpec bench_grid() {
  GridSpec s;
  s.nx = 32;
  s.ny = 16;
  return s;
}

void BM_SweepMeasureSerial(benchmark::State& state) {
  const GridSpec s = bench_grid();
  for (auto _ : state) {
    benchmark::DoNotOptimize(serial::sweep_measure(s, 50, 10000, 1));
  }
}

void BM_SweepMeasureParallel(benchmark::State& state) {
  const GridSpec s = bench_grid();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sweep_measure(s, 50, 10000, 1, threads));
  }
}

void BM_SweepAsymptoticSerial(benchmark::State& state) {
  const GridSpec s = bench_grid();
  for (auto _ : state) {
    benchmark::DoNotOptimize(serial::sweep_asymptotic(s, 30, 60));
  }
}

void BM_SweepAsymptoticParallel(benchmark::State& state) {
  const GridSpec s = bench_grid();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sweep_asymptotic(s, 30, 60, threads));
  }
}

const PWLMap kSpeckled = make_normal_form(2.5, 1.4, -0.5, -1.2);

void BM_RhoSampledSerial(benchmark::State& state) {
  OrbitOptions orbit;
  for (auto _ : state) {
    benchmark::DoNotOptimize(serial::rho_sampled(kSpeckled, 10000, orbit, 1));
  }
}

void BM_RhoSampledParallel(benchmark::State& state) {
  OrbitOptions orbit;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rho_sampled(kSpeckled, 10000, orbit, 1));
  }
}

}  // namespace

BENCHMARK(BM_SweepMeasureSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepMeasureParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepAsymptoticSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepAsymptoticParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RhoSampledSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RhoSampledParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
