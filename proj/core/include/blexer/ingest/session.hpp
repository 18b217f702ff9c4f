#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "blexer/common/event_log.hpp"
#include "blexer/common/ring_buffer.hpp"
#include "blexer/ingest/baseline.hpp"
#include "blexer/ingest/rr.hpp"
#include "blexer/ingest/samples.hpp"
#include "blexer/wire/envelope.hpp"

namespace blexer::ingest {

// What a session hands to fusion for every accepted packet.
struct NormalizedItem {
  Sample sample;
  std::optional<Baseline> baseline;  // heart-rate streams only
  std::uint64_t recv_ns = 0;         // steady-clock receipt stamp, for latency
};

struct SessionOptions {
  ArtifactRule artifacts;
  TimeMs max_regress_ms = 10'000;
  // Consecutive jump-rejections after which the artifact reference resets
  // to the newest in-range interval (recovers from a real rate change).
  std::size_t reference_reset_after = 5;
  std::size_t ring_capacity = 0;  // 0: ten minutes at the stream's nominal rate
};

struct SessionCounters {
  std::size_t accepted = 0;
  std::size_t stale_dropped = 0;
  std::size_t wrong_stream = 0;
  std::size_t rr_dropped = 0;
};

std::optional<Stream> stream_for(wire::DeviceType device);
std::optional<Stream> stream_for(wire::MsgType type);
double nominal_rate_hz(Stream s);

// Normalizes one device's packets. Created once the device's HELLO has been
// accepted, so it starts ACTIVE; close() ends it.
class SensorSession {
 public:
  using Forward = std::function<void(NormalizedItem)>;

  SensorSession(std::string session_id, wire::DeviceType device, SessionOptions options = {},
                Forward forward = {}, EventSink* log = nullptr);

  // Converts, filters and stamps one data envelope. Throws
  // Error{WrongStream} for a message of another stream and
  // Error{StaleTimestamp} when the device clock regresses by more than
  // max_regress_ms (the packet is dropped and counted).
  std::vector<Sample> accept_packet(const wire::Envelope& env, TimeMs hub_ts,
                                    std::uint64_t recv_ns = 0);

  // Feeds the resting-rate calibration; see BaselineTracker.
  const Baseline& update_baseline(int bpm, TimeMs hub_ts) { return baseline_.update(bpm, hub_ts); }
  const Baseline& baseline() const { return baseline_.current(); }

  void close() { active_ = false; }
  bool active() const { return active_; }

  const std::string& id() const { return id_; }
  Stream stream() const { return stream_; }
  wire::DeviceType device() const { return device_; }
  const SessionCounters& counters() const { return counters_; }
  const RingBuffer<Sample>& buffer() const { return ring_; }

 private:
  Sample normalize(const wire::Envelope& env, TimeMs hub_ts);
  EcgSample normalize_ecg(const wire::EcgMsg& m);

  std::string id_;
  wire::DeviceType device_;
  Stream stream_;
  SessionOptions options_;
  Forward forward_;
  EventSink* log_;
  RingBuffer<Sample> ring_;
  BaselineTracker baseline_;
  SessionCounters counters_;
  std::optional<TimeMs> max_device_ts_;
  std::optional<double> rr_reference_;
  std::size_t consecutive_jumps_ = 0;
  bool active_ = true;
};

// One normalized sample as a raw.jsonl record. The record keeps the values
// as received so a replay can rebuild the original envelope.
nlohmann::json sample_to_json(const Sample& s);
// Inverse of sample_to_json; std::nullopt when the record is not a sample.
std::optional<Sample> sample_from_json(const nlohmann::json& j);

}  // namespace blexer::ingest
