#include "blexer/net/client.hpp"

#include <thread>

#include <boost/asio.hpp>

#include "blexer/common/error.hpp"
#include "blexer/wire/codec.hpp"

namespace blexer::net {

namespace asio = boost::asio;
using tcp = asio::ip::tcp;
using udp = asio::ip::udp;

std::set<std::string> capabilities_for(wire::DeviceType d) {
  switch (d) {
    case wire::DeviceType::EcgChest: return {"ECG"};
    case wire::DeviceType::PpgWrist: return {"PPG"};
    case wire::DeviceType::Mocap: return {"SKEL_AFFECT"};
    case wire::DeviceType::Game: return {"DIRECTIVE", "PERF_REPORT"};
    case wire::DeviceType::Dashboard: return {"ALERT", "OVERRIDE"};
  }
  return {};
}

struct DeviceClient::Impl {
  asio::io_context io;
  tcp::socket socket{io};
  wire::LineFramer framer;
  std::deque<std::string> lines;
  std::array<char, 8192> buffer{};
};

DeviceClient::DeviceClient(std::string host, std::uint16_t port, wire::DeviceType device)
    : impl_(std::make_unique<Impl>()), host_(std::move(host)), port_(port), device_(device) {}

DeviceClient::~DeviceClient() { close(); }

void DeviceClient::open() {
  tcp::resolver resolver(impl_->io);
  asio::connect(impl_->socket, resolver.resolve(host_, std::to_string(port_)));
  impl_->socket.set_option(tcp::no_delay(true));
  closed_ = false;
}

wire::AckMsg DeviceClient::connect(std::chrono::milliseconds timeout) {
  open();
  wire::HelloMsg hello;
  hello.device_type = device_;
  hello.capabilities = capabilities_for(device_);
  send(hello);
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (std::chrono::steady_clock::now() < deadline) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    auto env = receive(std::max(left, std::chrono::milliseconds(1)));
    if (!env) break;
    if (const auto* ack = std::get_if<wire::AckMsg>(&env->payload)) return *ack;
    if (const auto* bye = std::get_if<wire::ByeMsg>(&env->payload))
      throw Error(Errc::ProtocolViolation, "hello", "hub refused: " + bye->reason);
  }
  throw Error(Errc::ProtocolViolation, "hello", "no ACK from hub");
}

void DeviceClient::send(wire::Payload payload, TimeMs sent_at) {
  wire::Envelope env{seq_++, sent_at ? sent_at : wall_clock_ms(), std::move(payload)};
  send_raw(wire::encode(env));
}

void DeviceClient::send_raw(const std::string& bytes) {
  asio::write(impl_->socket, asio::buffer(bytes));
}

std::optional<wire::Envelope> DeviceClient::receive(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (true) {
    while (!impl_->lines.empty()) {
      const std::string line = std::move(impl_->lines.front());
      impl_->lines.pop_front();
      try {
        return wire::decode(line);
      } catch (const Error&) {
      }
    }
    if (closed_ || std::chrono::steady_clock::now() >= deadline) return std::nullopt;
    bool done = false;
    impl_->socket.async_read_some(asio::buffer(impl_->buffer),
                                  [&](const boost::system::error_code& ec, std::size_t n) {
                                    done = true;
                                    if (ec == asio::error::operation_aborted) return;
                                    if (ec) {
                                      closed_ = true;
                                      return;
                                    }
                                    impl_->framer.feed(
                                        std::string_view(impl_->buffer.data(), n),
                                        [&](std::string_view l) { impl_->lines.emplace_back(l); });
                                  });
    impl_->io.restart();
    impl_->io.run_until(deadline);
    if (!done) {
      impl_->socket.cancel();
      impl_->io.restart();
      impl_->io.run();
      return std::nullopt;
    }
  }
}

void DeviceClient::bye(const std::string& reason) {
  if (closed_ || !impl_->socket.is_open()) return;
  try {
    send(wire::ByeMsg{reason});
  } catch (const std::exception&) {
  }
  close();
}

void DeviceClient::close() {
  if (!impl_ || !impl_->socket.is_open()) return;
  boost::system::error_code ignored;
  impl_->socket.shutdown(tcp::socket::shutdown_both, ignored);
  impl_->socket.close(ignored);
  closed_ = true;
}

struct DatagramClient::Impl {
  asio::io_context io;
  udp::socket socket{io};
  udp::endpoint hub;
};

DatagramClient::DatagramClient(std::string host, std::uint16_t port)
    : impl_(std::make_unique<Impl>()) {
  udp::resolver resolver(impl_->io);
  impl_->hub = *resolver.resolve(udp::v4(), host, std::to_string(port)).begin();
  impl_->socket.open(udp::v4());
}

DatagramClient::~DatagramClient() = default;

wire::AckMsg DatagramClient::hello(std::chrono::milliseconds timeout) {
  wire::HelloMsg h;
  h.device_type = wire::DeviceType::Mocap;
  h.capabilities = capabilities_for(h.device_type);
  send(h);
  std::array<char, wire::kMaxFrameBytes + 1> buf{};
  udp::endpoint from;
  std::optional<wire::AckMsg> ack;
  impl_->socket.async_receive_from(
      asio::buffer(buf), from, [&](const boost::system::error_code& ec, std::size_t n) {
        if (ec) return;
        try {
          auto env = wire::decode(std::string_view(buf.data(), n));
          if (auto* a = std::get_if<wire::AckMsg>(&env.payload)) ack = *a;
        } catch (const Error&) {
        }
      });
  impl_->io.restart();
  impl_->io.run_for(timeout);
  if (!ack) {
    impl_->socket.cancel();
    impl_->io.restart();
    impl_->io.run();
    throw Error(Errc::ProtocolViolation, "hello", "no ACK from hub");
  }
  return *ack;
}

void DatagramClient::send(wire::Payload payload, TimeMs sent_at) {
  wire::Envelope env{seq_++, sent_at ? sent_at : wall_clock_ms(), std::move(payload)};
  send_raw(wire::encode_datagram(env));
}

void DatagramClient::send_raw(const std::string& bytes) {
  impl_->socket.send_to(asio::buffer(bytes), impl_->hub);
}

void DatagramClient::bye(const std::string& reason) { send(wire::ByeMsg{reason}); }

FeedStats feed_stream(const std::vector<simkit::TimedEnvelope>& stream, const FeedTargets& to,
                      double speed, const std::atomic<bool>* stop) {
  using clock = std::chrono::steady_clock;
  FeedStats stats;
  if (stream.empty()) return stats;
  std::optional<DeviceClient> ecg, ppg;
  std::optional<DatagramClient> skel;
  const TimeMs t0 = stream.front().t;
  const auto wall0 = clock::now();
  for (const auto& e : stream) {
    if (stop && stop->load()) break;
    if (speed > 0.0) {
      const auto due = wall0 + std::chrono::microseconds(static_cast<std::int64_t>(
                                   static_cast<double>(e.t - t0) * 1000.0 / speed));
      std::this_thread::sleep_until(due);
    }
    const wire::MsgType type = e.env.type();
    if (e.device == wire::DeviceType::Mocap) {
      if (type == wire::MsgType::Hello) {
        skel.emplace(to.host, to.skel);
        skel->hello();
        ++stats.devices;
      } else if (skel && type == wire::MsgType::Bye) {
        skel->bye();
      } else if (skel && wire::is_data(type)) {
        skel->send(e.env.payload);
        ++stats.data_sent;
      }
      continue;
    }
    auto& link = e.device == wire::DeviceType::EcgChest ? ecg : ppg;
    if (type == wire::MsgType::Hello) {
      link.emplace(to.host, e.device == wire::DeviceType::EcgChest ? to.ecg : to.ppg, e.device);
      link->connect();
      ++stats.devices;
    } else if (link && type == wire::MsgType::Bye) {
      link->bye("stream finished");
    } else if (link && wire::is_data(type)) {
      link->send(e.env.payload);
      ++stats.data_sent;
    }
  }
  return stats;
}

PlayStats play_session(const std::string& host, std::uint16_t port, simkit::PlayerDriver& driver,
                       std::chrono::milliseconds duration, const std::atomic<bool>* stop) {
  using clock = std::chrono::steady_clock;
  PlayStats stats;
  DeviceClient link(host, port, wire::DeviceType::Game);
  link.connect();
  const auto begin = clock::now();
  auto next = begin;
  constexpr TimeMs kStep = 100;
  TimeMs last_heartbeat = wall_clock_ms();
  while (clock::now() - begin < duration && !(stop && stop->load())) {
    next += std::chrono::milliseconds(kStep);
    // Everything that arrives before the step boundary.
    while (true) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(next - clock::now());
      if (left.count() <= 0) break;
      auto env = link.receive(left);
      if (!env) break;
      if (const auto* d = std::get_if<cam::Directive>(&env->payload)) {
        driver.on_directive(*d, wall_clock_ms());
        ++stats.directives;
      } else if (std::holds_alternative<wire::ByeMsg>(env->payload)) {
        stats.hub_closed = true;
        break;
      }
    }
    if (link.closed() || stats.hub_closed) {
      stats.hub_closed = true;
      break;
    }
    const TimeMs now = wall_clock_ms();
    for (const auto& r : driver.step(now, kStep)) {
      link.send(r);
      ++stats.reports;
    }
    if (now - last_heartbeat >= wire::kHeartbeatIntervalMs) {
      link.send(wire::HeartbeatMsg{});
      last_heartbeat = now;
    }
  }
  if (!stats.hub_closed) link.bye("player finished");
  return stats;
}

}  // namespace blexer::net
