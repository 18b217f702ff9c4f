#include <benchmark/benchmark.h>

#include "blexer/wire/codec.hpp"

using namespace blexer;

namespace {

wire::Envelope ecg_envelope() {
  wire::EcgMsg m;
  m.bpm = 72;
  m.rr_raw = {850, 862, 841};
  return {42, 1'700'000'000'000, m};
}

wire::Envelope affect_envelope() {
  wire::SkelAffectMsg m;
  m.joints = std::vector<Vec3>(wire::kJointCount, Vec3{0.1, 1.2, 2.3});
  m.emotion7 = std::array<double, 7>{0.02, 0.01, 0.02, 0.25, 0.05, 0.05, 0.60};
  m.face_detected = true;
  return {7, 1'700'000'000'000, m};
}

void BM_EncodeEcg(benchmark::State& state) {
  const auto e = ecg_envelope();
  for (auto _ : state) benchmark::DoNotOptimize(wire::encode(e));
}
BENCHMARK(BM_EncodeEcg);

void BM_DecodeEcg(benchmark::State& state) {
  const auto line = wire::encode(ecg_envelope());
  for (auto _ : state) benchmark::DoNotOptimize(wire::decode(line));
}
BENCHMARK(BM_DecodeEcg);

void BM_DecodeSkeletonAffect(benchmark::State& state) {
  const auto line = wire::encode_datagram(affect_envelope());
  for (auto _ : state) benchmark::DoNotOptimize(wire::decode(line));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * line.size()));
}
BENCHMARK(BM_DecodeSkeletonAffect);

void BM_LineFramer(benchmark::State& state) {
  std::string chunk;
  for (int i = 0; i < 64; ++i) chunk += wire::encode(ecg_envelope());
  for (auto _ : state) {
    wire::LineFramer f;
    std::size_t lines = 0;
    f.feed(chunk, [&](std::string_view) { ++lines; });
    benchmark::DoNotOptimize(lines);
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * chunk.size()));
}
BENCHMARK(BM_LineFramer);

}  // namespace

BENCHMARK_MAIN();
