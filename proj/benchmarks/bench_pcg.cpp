#include <benchmark/benchmark.h>

#include "blexer/ipm/pcg.hpp"

using namespace blexer;

namespace {

void BM_PcgSequence(benchmark::State& state) {
  cam::TherapyPlan plan;
  const int q = static_cast<int>(state.range(0));
  plan.quotas = {{cam::TaskCategory::Coordination, q},
                 {cam::TaskCategory::ReactionSpeed, q},
                 {cam::TaskCategory::Memory, q / 2}};
  const auto catalog = ipm::default_catalog();
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(ipm::pcg_sequence(plan, catalog, ++seed));
}
BENCHMARK(BM_PcgSequence)->Range(2, 256);

}  // namespace

BENCHMARK_MAIN();
