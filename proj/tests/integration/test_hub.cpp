#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <condition_variable>
#include <mutex>
#include <thread>

#include "blexer/cam/config_io.hpp"
#include "blexer/net/client.hpp"
#include "blexer/net/hub.hpp"
#include "blexer/runtime/engine.hpp"
#include "blexer/simkit/replay.hpp"
#include "blexer/simkit/scenario.hpp"
#include "tmpdir.hpp"

using namespace blexer;
using nlohmann::json;
namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;

namespace {

runtime::HubConfig test_config(const std::filesystem::path& dir) {
  runtime::HubConfig c;
  c.bind_address = "127.0.0.1";
  c.port_ecg = c.port_ppg = c.port_game = c.port_skel = c.http_port = 0;
  c.sessions_dir = dir;
  c.session_id = "it-session";
  return c;
}

// Collects /ws/live events on a background thread.
class WsListener {
 public:
  explicit WsListener(std::uint16_t port) : ws_(io_) {
    asio::ip::tcp::resolver resolver(io_);
    asio::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1", "/ws/live");
    reader_ = std::thread([this] {
      beast::flat_buffer buf;
      beast::error_code ec;
      while (true) {
        ws_.read(buf, ec);
        if (ec) break;
        auto j = json::parse(beast::buffers_to_string(buf.data()), nullptr, false);
        buf.consume(buf.size());
        std::lock_guard lock(mutex_);
        events_.push_back(std::move(j));
        cv_.notify_all();
      }
    });
  }
  ~WsListener() {
    beast::error_code ec;
    ws_.next_layer().shutdown(asio::ip::tcp::socket::shutdown_both, ec);
    reader_.join();
  }

  // First event of `type` matching `pred`, waiting up to `timeout`.
  template <class Pred>
  std::optional<json> wait_for(const std::string& type, std::chrono::milliseconds timeout, Pred pred) {
    std::unique_lock lock(mutex_);
    std::optional<json> found;
    cv_.wait_for(lock, timeout, [&] {
      for (const auto& e : events_)
        if (e.is_object() && e.value("type", "") == type && pred(e["data"])) {
          found = e;
          return true;
        }
      return false;
    });
    return found;
  }
  std::optional<json> wait_for(const std::string& type, std::chrono::milliseconds timeout) {
    return wait_for(type, timeout, [](const json&) { return true; });
  }

 private:
  asio::io_context io_;
  websocket::stream<asio::ip::tcp::socket> ws_;
  std::thread reader_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::vector<json> events_;
};

json get_json(httplib::Client& c, const std::string& path, int want = 200) {
  auto r = c.Get(path.c_str());
  REQUIRE(r);
  CHECK(r->status == want);
  return json::parse(r->body);
}

httplib::Result post(httplib::Client& c, const std::string& path, const std::string& body) {
  return c.Post(path.c_str(), body, "application/json");
}

}  // namespace

TEST_CASE("live hub serves the API, streams events and records a replayable session") {
  TempDir tmp("blexer-it");
  net::Hub hub(test_config(tmp.path));
  hub.start();
  REQUIRE(hub.http_port() != 0);
  REQUIRE(hub.port_ecg() != 0);

  httplib::Client http("127.0.0.1", hub.http_port());
  http.set_read_timeout(10, 0);

  auto state = get_json(http, "/api/state");
  CHECK(state["session_id"] == "it-session");
  CHECK(state["active"] == true);
  CHECK(state["directive"]["rationale"] == json::array({"INIT"}));

  const auto metrics = get_json(http, "/api/metrics");
  CHECK(metrics.is_object());
  const auto sessions = get_json(http, "/api/sessions");
  REQUIRE(sessions.is_array());
  bool live = false;
  for (const auto& s : sessions) live = live || (s["session_id"] == "it-session" && s["live"] == true);
  CHECK(live);
  get_json(http, "/api/nothing-here", 404);
  CHECK(get_json(http, "/api/plan") == cam::to_json(cam::TherapyPlan{}));

  WsListener ws(hub.http_port());
  const auto hello = ws.wait_for("hello", std::chrono::seconds(5));
  REQUIRE(hello);
  CHECK((*hello)["data"]["session_id"] == "it-session");

  // Operator override: echoed directive, broadcast to subscribers.
  auto r = post(http, "/api/override", R"({"kind":"SET_DIFFICULTY","value":3,"issued_by":"it"})");
  REQUIRE(r);
  CHECK(r->status == 200);
  const auto echoed = json::parse(r->body);
  CHECK(echoed["directive"]["difficulty_target"] == 3);
  CHECK(echoed["directive"]["rationale"][0] == "OVERRIDE:SET_DIFFICULTY");
  CHECK(ws.wait_for("directive", std::chrono::seconds(5),
                    [](const json& d) { return d["difficulty_target"] == 3; }));

  r = post(http, "/api/override", R"({"kind":"SET_DIFFICULTY","value":14})");
  REQUIRE(r);
  CHECK(r->status == 400);
  CHECK(json::parse(r->body)["error"] == "InvalidOverride");
  r = post(http, "/api/override", R"({"value":3})");
  REQUIRE(r);
  CHECK(r->status == 400);
  r = post(http, "/api/override", "{not json");
  REQUIRE(r);
  CHECK(r->status == 400);
  CHECK(get_json(http, "/api/state")["directive"]["difficulty_target"] == 3);

  // A low threshold makes any measured fatigue raise an alert.
  cam::TherapyPlan plan;
  plan.engagement_threshold = 0.005;
  plan.fatigue_threshold = 0.01;
  r = post(http, "/api/plan", cam::to_json(plan).dump());
  REQUIRE(r);
  CHECK(r->status == 200);
  r = post(http, "/api/plan", R"({"fatigue_threshold":2.0})");
  REQUIRE(r);
  CHECK(r->status == 400);

  std::atomic<bool> stop{false};
  net::FeedTargets to;
  to.ecg = hub.port_ecg();
  to.ppg = hub.port_ppg();
  to.skel = hub.port_skel();
  std::thread feeder([&] {
    net::feed_stream(simkit::generate_stream(simkit::bundled_scenario("steady-exercise", 3)), to, 1.0, &stop);
  });
  const auto alert = ws.wait_for("alert", std::chrono::seconds(40),
                                 [](const json& a) { return a["kind"] == "FATIGUE_THRESHOLD"; });
  CHECK(ws.wait_for("state", std::chrono::seconds(5)));
  stop = true;
  feeder.join();
  REQUIRE(alert);
  CHECK((*alert)["data"]["severity"] == "warning");

  const auto with_alert = get_json(http, "/api/state");
  REQUIRE_FALSE(with_alert["alerts"].empty());
  const auto id = with_alert["alerts"][0]["id"].get<std::uint64_t>();
  r = post(http, "/api/ack-alert", json{{"id", id}}.dump());
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(get_json(http, "/api/state")["alerts"][0]["acknowledged"] == true);
  CHECK(hub.counters().samples.load() > 0);
  CHECK(hub.latency().count > 0);

  hub.stop();

  const auto dir = tmp.path / "it-session";
  const auto recorded = simkit::read_directives(dir);
  REQUIRE(recorded.size() >= 2);
  const auto replayed = simkit::replay_session(dir);
  CHECK(replayed.directive_hash == runtime::directive_sequence_hash(recorded));
  CHECK(replayed.directives.size() == recorded.size());
}

TEST_CASE("reads leave the engine state untouched") {
  TempDir tmp("blexer-it");
  net::Hub hub(test_config(tmp.path));
  hub.start();
  httplib::Client http("127.0.0.1", hub.http_port());
  // With no input the engine only ticks, so compare hashes between two
  // samples taken at the same logical time.
  for (int attempt = 0; attempt < 20; ++attempt) {
    const auto before = hub.snapshot();
    for (const char* p : {"/api/state", "/api/metrics", "/api/sessions", "/api/plan", "/api/config"})
      get_json(http, p);
    const auto after = hub.snapshot();
    if (after->now != before->now) continue;
    CHECK(after->state_hash == before->state_hash);
    break;
  }
  hub.stop();
}

TEST_CASE("game link receives directives and returns reports") {
  TempDir tmp("blexer-it");
  net::Hub hub(test_config(tmp.path));
  hub.start();
  net::DeviceClient game("127.0.0.1", hub.port_game(), wire::DeviceType::Game);
  const auto ack = game.connect();
  CHECK(ack.session_id == "it-session");
  bool got_directive = false;
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(5);
  while (!got_directive && std::chrono::steady_clock::now() < deadline) {
    auto env = game.receive(std::chrono::milliseconds(500));
    if (env && env->type() == wire::MsgType::Directive) got_directive = true;
  }
  CHECK(got_directive);
  ipm::PerformanceReport rep;
  rep.exercise_id = "alternating_arm_lifts";
  rep.success_rate = 0.75;
  rep.reps_done = 4;
  rep.errors = 1;
  game.send(rep);
  game.bye();
  const auto until = std::chrono::steady_clock::now() + std::chrono::seconds(5);
  while (hub.counters().reports.load() == 0 && std::chrono::steady_clock::now() < until)
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  CHECK(hub.counters().reports.load() == 1);
  CHECK(hub.snapshot()->alerts.empty());
  hub.stop();
}
