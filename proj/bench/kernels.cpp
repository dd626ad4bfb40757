// Serial reference against the OpenMP path for the parallel kernels.
#include "ph3/box.hpp"
#include "ph3/catalog.hpp"
#include "ph3/cocycle.hpp"
#include "ph3/density.hpp"
#include "ph3/leaves.hpp"
#include "ph3/periodic.hpp"

#include <benchmark/benchmark.h>

using namespace ph3;

namespace {

Execution policy(const benchmark::State& state) { return state.range(0) ? Execution::parallel : Execution::serial; }

const TorusMap& da_ph() {
  static const TorusMap f(builtin_map("da_ph:0.2"));
  return f;
}

void BM_LyapunovEnsemble(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(lyapunov_ensemble(da_ph(), 8, 1, 50000, 1000, policy(state)));
}

void BM_DensityProfile(benchmark::State& state) {
  LeafOptions o;
  o.spacing = 1e-2;
  const LeafSegment leaf = trace_strong_leaf(da_ph(), Sigma::u, Vec3(0.31, 0.72, 0.45), 10.0, o);
  for (auto _ : state) benchmark::DoNotOptimize(density_profile(da_ph(), leaf, 1e-8, -1, policy(state)));
}

void BM_LeafTrace(benchmark::State& state) {
  LeafOptions o;
  o.spacing = 1e-2;
  o.exec = policy(state);
  for (auto _ : state)
    benchmark::DoNotOptimize(trace_strong_leaf(da_ph(), Sigma::u, Vec3(0.31, 0.72, 0.45), 50.0, o));
}

void BM_EmpiricalDisintegration(benchmark::State& state) {
  static const TorusMap f(builtin_map("da_ph:0.05"));
  static const FoliatedBox box = build_foliated_box(f, Sigma::u, Vec3(0.31, 0.72, 0.45), 2.0, 0.05, 9);
  for (auto _ : state) benchmark::DoNotOptimize(empirical_disintegration(box, 200000, 50, 42, policy(state)));
}

void BM_PeriodicSearch(benchmark::State& state) {
  static const TorusMap f(builtin_map("da_anosov:0.2"));
  PeriodicOptions o;
  o.exec = policy(state);
  for (auto _ : state) benchmark::DoNotOptimize(find_periodic_points(f, 2, o));
}

}  // namespace

BENCHMARK(BM_LyapunovEnsemble)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DensityProfile)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LeafTrace)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EmpiricalDisintegration)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PeriodicSearch)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
