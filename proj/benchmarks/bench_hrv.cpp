#include <benchmark/benchmark.h>

#include <random>

#include "blexer/fusion/hrv.hpp"

namespace {

std::vector<double> intervals(std::size_t n) {
  std::mt19937_64 g(1);
  std::normal_distribution<double> d(850, 40);
  std::vector<double> rr(n);
  for (auto& x : rr) x = d(g);
  return rr;
}

void BM_Rmssd(benchmark::State& state) {
  const auto rr = intervals(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(blexer::fusion::rmssd(rr));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Rmssd)->Range(8, 4096);

void BM_Sdnn(benchmark::State& state) {
  const auto rr = intervals(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(blexer::fusion::sdnn(rr));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sdnn)->Range(8, 4096);

void BM_MotionSmoothness(benchmark::State& state) {
  const auto m = intervals(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(blexer::fusion::motion_smoothness(m));
}
BENCHMARK(BM_MotionSmoothness)->Range(8, 1024);

}  // namespace

BENCHMARK_MAIN();
