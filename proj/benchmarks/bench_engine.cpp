#include <benchmark/benchmark.h>

#include "blexer/ingest/session.hpp"
#include "blexer/runtime/engine.hpp"
#include "blexer/simkit/closed_loop.hpp"
#include "blexer/simkit/scenario.hpp"
#include "blexer/simkit/stream_gen.hpp"

using namespace blexer;

namespace {

// A minute of scripted sensor data through sessions, fusion, inference and rules.
void BM_EngineMinute(benchmark::State& state) {
  const auto stream = simkit::generate_stream(simkit::bundled_scenario("stress-spike", 1));
  for (auto _ : state) {
    runtime::Engine engine({}, 0);
    engine.start();
    ingest::SensorSession ecg("b", wire::DeviceType::EcgChest), ppg("b", wire::DeviceType::PpgWrist),
        skel("b", wire::DeviceType::Mocap);
    std::size_t next = 0;
    for (TimeMs t = 0; t <= 60'000; t += 100) {
      engine.advance_to(t);
      while (next < stream.size() && stream[next].t <= t) {
        const auto& e = stream[next++];
        if (!wire::is_data(e.env.type())) continue;
        auto& s = e.device == wire::DeviceType::EcgChest ? ecg : e.device == wire::DeviceType::PpgWrist ? ppg : skel;
        for (const auto& x : s.accept_packet(e.env, t)) engine.ingest(x);
      }
    }
    benchmark::DoNotOptimize(engine.state_hash());
  }
}
BENCHMARK(BM_EngineMinute)->Unit(benchmark::kMillisecond);

void BM_ClosedLoopTenMinutes(benchmark::State& state) {
  simkit::SimOptions o;
  o.duration_ms = 600'000;
  for (auto _ : state) benchmark::DoNotOptimize(simkit::run_simulation(o).directive_hash);
}
BENCHMARK(BM_ClosedLoopTenMinutes)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
