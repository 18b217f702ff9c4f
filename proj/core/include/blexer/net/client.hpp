#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <set>
#include <string>

#include "blexer/simkit/player_driver.hpp"
#include "blexer/simkit/stream_gen.hpp"
#include "blexer/wire/envelope.hpp"
#include "blexer/wire/handshake.hpp"

namespace blexer::net {

// Stream names a device of this type announces in its HELLO.
std::set<std::string> capabilities_for(wire::DeviceType d);

// Blocking client for one TCP device link (a sensor or the game). Not
// thread-safe.
class DeviceClient {
 public:
  DeviceClient(std::string host, std::uint16_t port, wire::DeviceType device);
  ~DeviceClient();
  DeviceClient(const DeviceClient&) = delete;
  DeviceClient& operator=(const DeviceClient&) = delete;

  // Connects and sends HELLO. Returns the ACK; throws
  // Error{ProtocolViolation} when the hub answers otherwise or not at all.
  wire::AckMsg connect(std::chrono::milliseconds timeout = std::chrono::seconds(5));
  // Opens the socket only; nothing is sent.
  void open();

  // Stamps seq and sent_at and sends.
  void send(wire::Payload payload, TimeMs sent_at = 0);
  void send_raw(const std::string& bytes);

  // Next inbound envelope (heartbeats included). Undecodable lines are
  // skipped. std::nullopt on timeout or a closed link.
  std::optional<wire::Envelope> receive(std::chrono::milliseconds timeout);
  bool closed() const { return closed_; }

  void bye(const std::string& reason = "done");
  void close();

  std::uint64_t next_seq() const { return seq_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::string host_;
  std::uint16_t port_;
  wire::DeviceType device_;
  std::uint64_t seq_ = 1;
  bool closed_ = false;
};

// Sender for the UDP skeleton/affect link.
class DatagramClient {
 public:
  DatagramClient(std::string host, std::uint16_t port);
  ~DatagramClient();
  DatagramClient(const DatagramClient&) = delete;
  DatagramClient& operator=(const DatagramClient&) = delete;

  // Sends HELLO and waits for the ACK datagram.
  wire::AckMsg hello(std::chrono::milliseconds timeout = std::chrono::seconds(5));
  void send(wire::Payload payload, TimeMs sent_at = 0);
  void send_raw(const std::string& bytes);
  void bye(const std::string& reason = "done");

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::uint64_t seq_ = 1;
};

struct FeedTargets {
  std::string host = "127.0.0.1";
  std::uint16_t ecg = 9101;
  std::uint16_t ppg = 9102;
  std::uint16_t skel = 9104;  // UDP
};

struct FeedStats {
  std::size_t data_sent = 0;
  std::size_t devices = 0;
};

// Plays a generated stream against a hub at `speed` times its own pacing.
// HELLO entries open the device link, BYE entries close it, data goes out
// stamped with the wall clock.
FeedStats feed_stream(const std::vector<simkit::TimedEnvelope>& stream, const FeedTargets& to,
                      double speed = 1.0, const std::atomic<bool>* stop = nullptr);

struct PlayStats {
  std::size_t directives = 0;
  std::size_t reports = 0;
  bool hub_closed = false;
};

// Attaches the reference game to a hub's GAME port and plays in real time
// (100 ms steps) until `duration` passes, `stop` is set or the hub leaves.
PlayStats play_session(const std::string& host, std::uint16_t port, simkit::PlayerDriver& driver,
                       std::chrono::milliseconds duration, const std::atomic<bool>* stop = nullptr);

}  // namespace blexer::net
