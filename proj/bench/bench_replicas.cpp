// Serial versus OpenMP replica kernels, plus the generic and dense box kernels.

#include <benchmark/benchmark.h>

#include "usf/experiments.hpp"
#include "usf/forest.hpp"
#include "usf/walker.hpp"

using namespace usf;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::openmp : Exec::serial; }

void BM_LerwLength(benchmark::State& state) {
  for (auto _ : state) {
    auto r = exp_lerw_length(5, 16, {0.2}, {2.0}, 64, RunOpts{1, exec_of(state)});
    benchmark::DoNotOptimize(r.lengths.data());
  }
  state.SetItemsProcessed(state.iterations() * 64);
}

void BM_TwoPoint(benchmark::State& state) {
  for (auto _ : state) {
    auto r = exp_two_point(5, 16, {2, 4, 8}, 64, RunOpts{1, exec_of(state)});
    benchmark::DoNotOptimize(r.p.data());
  }
  state.SetItemsProcessed(state.iterations() * 64 * 3);
}

void BM_Ball(benchmark::State& state) {
  for (auto _ : state) {
    auto r = exp_ball(5, {8}, {1.0}, {0.5}, 32, RunOpts{1, exec_of(state)});
    benchmark::DoNotOptimize(r.data());
  }
  state.SetItemsProcessed(state.iterations() * 32);
}

void BM_BoxGeneric(benchmark::State& state) {
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(box_volume_sample(5, 3, 4, 1, i++));
}

void BM_BoxDense(benchmark::State& state) {
  std::uint64_t i = 0;
  for (auto _ : state) {
    RngStream rng(1, i++);
    benchmark::DoNotOptimize(box_component_dense(5, 3, 4, rng));
  }
}

void BM_LoopErase(benchmark::State& state) {
  RngStream rng(2, 0);
  StopRule rule;
  rule.step_cap = static_cast<std::uint64_t>(state.range(0));
  const Path w = run_walk(Point(5), rule, rng).path;
  for (auto _ : state) benchmark::DoNotOptimize(loop_erase(w).v.data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_LerwLength)->ArgName("omp")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TwoPoint)->ArgName("omp")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Ball)->ArgName("omp")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BoxGeneric)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BoxDense)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LoopErase)->Arg(1 << 12)->Arg(1 << 16);

BENCHMARK_MAIN();
