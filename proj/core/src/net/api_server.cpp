#include "blexer/net/api_server.hpp"

#include <deque>
#include <optional>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "blexer/cam/config_io.hpp"
#include "blexer/common/error.hpp"
#include "blexer/common/hash.hpp"
#include "blexer/net/hub.hpp"
#include "blexer/runtime/config.hpp"
#include "blexer/wire/payload_json.hpp"

namespace blexer::net {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using json = nlohmann::json;

namespace {

using Request = http::request<http::string_body>;
using Response = http::response<http::string_body>;

Response make_response(const Request& req, http::status status, const json& body) {
  Response res{status, req.version()};
  res.set(http::field::server, "blexer-hub");
  res.set(http::field::content_type, "application/json");
  res.set(http::field::access_control_allow_origin, "*");
  res.keep_alive(req.keep_alive());
  res.body() = body.dump();
  res.prepare_payload();
  return res;
}

json error_json(std::string_view error, std::string_view detail = {}) {
  json j{{"error", error}};
  if (!detail.empty()) j["detail"] = detail;
  return j;
}

json state_json(const Snapshot& s) {
  json j{{"session_id", s.session_id},
         {"active", s.active},
         {"t", s.now},
         {"directive", wire::to_json(s.directive)},
         {"ipm_phase", s.directive.rest ? "REST" : "ACTIVE"},
         {"state_hash", hex64(s.state_hash)}};
  j["state"] = s.state ? cam::to_json(*s.state) : json(nullptr);
  j["frame"] = s.frame ? fusion::to_json(*s.frame) : json(nullptr);
  json alerts = json::array();
  for (const auto& a : s.alerts) alerts.push_back(wire::to_json(a));
  j["alerts"] = alerts;
  return j;
}

// Parses {kind, value, issued_by}; throws Error{InvalidOverride}.
iam::OverrideCommand override_from_body(const json& body) {
  if (!body.is_object()) throw Error(Errc::InvalidOverride, "body", "expected a JSON object");
  const auto kind_it = body.find("kind");
  if (kind_it == body.end() || !kind_it->is_string())
    throw Error(Errc::InvalidOverride, "kind", "missing override kind");
  const auto kind = iam::parse_override_kind(kind_it->get<std::string>());
  if (!kind) throw Error(Errc::InvalidOverride, "kind", "unknown override kind");
  iam::OverrideCommand cmd;
  cmd.kind = *kind;
  cmd.issued_by = body.value("issued_by", std::string("dashboard"));
  const auto v = body.find("value");
  if (cmd.kind == iam::OverrideKind::SetDifficulty) {
    if (v == body.end() || !v->is_number_integer())
      throw Error(Errc::InvalidOverride, "value", "SET_DIFFICULTY needs an integer level");
    cmd.level = v->get<int>();
  } else if (cmd.kind == iam::OverrideKind::SwitchCategory) {
    if (v == body.end() || !v->is_string())
      throw Error(Errc::InvalidOverride, "value", "SWITCH_CATEGORY needs a category");
    cmd.category = cam::parse_category(v->get<std::string>());
    if (!cmd.category) throw Error(Errc::InvalidOverride, "value", "unknown category");
  }
  return cmd;
}

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket socket, Hub& hub) : ws_(std::move(socket)), hub_(hub) {}

  void run(Request req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->subscribe();
      self->read();
    });
  }

  void close() {
    asio::post(ws_.get_executor(), [self = shared_from_this()] {
      if (self->closed_) return;
      self->closed_ = true;
      self->ws_.async_close(websocket::close_code::going_away, [self](beast::error_code) {});
    });
  }

 private:
  void subscribe() {
    std::weak_ptr<WsSession> weak = shared_from_this();
    auto exec = ws_.get_executor();
    sub_ = hub_.subscribe([weak, exec] {
      asio::post(exec, [weak] {
        if (auto self = weak.lock()) self->pump();
      });
    });
    // Greet with the current view so a fresh client needs no extra request.
    const auto snap = hub_.snapshot();
    outbox_.push_back(std::make_shared<const std::string>(
        json{{"type", "hello"}, {"data", state_json(*snap)}}.dump()));
    write();
  }

  void pump() {
    if (closed_ || !sub_) return;
    for (auto& e : sub_->take()) outbox_.push_back(std::move(e));
    if (!writing_) write();
  }

  void write() {
    if (outbox_.empty()) {
      writing_ = false;
      // Re-arms the subscription when nothing new arrived.
      pump_if_pending();
      return;
    }
    writing_ = true;
    ws_.text(true);
    current_ = outbox_.front();
    outbox_.pop_front();
    ws_.async_write(asio::buffer(*current_),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) {
                        self->finish();
                        return;
                      }
                      self->write();
                    });
  }

  void pump_if_pending() {
    if (closed_ || !sub_) return;
    auto more = sub_->take();
    if (more.empty()) return;
    for (auto& e : more) outbox_.push_back(std::move(e));
    write();
  }

  void read() {
    ws_.async_read(in_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->finish();
        return;
      }
      self->in_.consume(self->in_.size());
      self->read();
    });
  }

  void finish() {
    closed_ = true;
    if (sub_) {
      hub_.unsubscribe(sub_);
      sub_.reset();
    }
    outbox_.clear();
  }

  websocket::stream<beast::tcp_stream> ws_;
  Hub& hub_;
  std::shared_ptr<Subscription> sub_;
  std::deque<std::shared_ptr<const std::string>> outbox_;
  std::shared_ptr<const std::string> current_;
  beast::flat_buffer in_;
  bool writing_ = false;
  bool closed_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket socket, Hub& hub, std::function<void(std::shared_ptr<WsSession>)> on_ws)
      : stream_(std::move(socket)), hub_(hub), on_ws_(std::move(on_ws)) {}

  void run() { read(); }

 private:
  void read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) {
                       if (ec) {
                         self->close();
                         return;
                       }
                       self->dispatch();
                     });
  }

  void dispatch() {
    if (websocket::is_upgrade(req_)) {
      if (req_.target() == "/ws/live") {
        stream_.expires_never();
        auto ws = std::make_shared<WsSession>(stream_.release_socket(), hub_);
        if (on_ws_) on_ws_(ws);
        ws->run(std::move(req_));
        return;
      }
      send(make_response(req_, http::status::not_found, error_json("unknown websocket path")));
      return;
    }
    route();
  }

  void reply_later(int status, json body) {
    // Called from the engine thread; the response goes out on ours.
    asio::post(stream_.get_executor(), [self = shared_from_this(), status, b = std::move(body)] {
      self->send(make_response(self->req_, static_cast<http::status>(status), b));
    });
  }

  void route() {
    const std::string target(req_.target());
    const std::string path = target.substr(0, target.find('?'));
    const auto method = req_.method();

    if (method == http::verb::options) {
      Response res = make_response(req_, http::status::no_content, json::object());
      res.set(http::field::access_control_allow_methods, "GET, POST, OPTIONS");
      res.set(http::field::access_control_allow_headers, "Content-Type");
      res.body().clear();
      res.prepare_payload();
      send(std::move(res));
      return;
    }

    if (method == http::verb::get) {
      const auto snap = hub_.snapshot();
      if (path == "/api/state") return send(make_response(req_, http::status::ok, state_json(*snap)));
      if (path == "/api/plan")
        return send(make_response(req_, http::status::ok, cam::to_json(snap->plan)));
      if (path == "/api/config")
        return send(make_response(req_, http::status::ok,
                                  {{"hub", runtime::to_json(hub_.config())},
                                   {"rules", cam::to_json(snap->rules)},
                                   {"ports",
                                    {{"ecg", hub_.port_ecg()},
                                     {"ppg", hub_.port_ppg()},
                                     {"game", hub_.port_game()},
                                     {"skel", hub_.port_skel()},
                                     {"http", hub_.http_port()}}}}));
      if (path == "/api/metrics") return send(make_response(req_, http::status::ok, hub_.metrics()));
      if (path == "/api/sessions") {
        json list = list_sessions(hub_.config().sessions_dir);
        bool seen = false;
        for (auto& s : list) {
          s["live"] = s["session_id"] == snap->session_id && snap->active;
          seen = seen || s["session_id"] == snap->session_id;
        }
        if (!seen && !snap->session_id.empty())
          list.push_back({{"session_id", snap->session_id},
                          {"started_at", snap->started_at},
                          {"ended_at", nullptr},
                          {"live", snap->active}});
        return send(make_response(req_, http::status::ok, list));
      }
      const std::string prefix = "/api/sessions/";
      const std::string suffix = "/summary";
      if (path.rfind(prefix, 0) == 0 && path.size() > prefix.size() + suffix.size() &&
          path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0) {
        const std::string id =
            path.substr(prefix.size(), path.size() - prefix.size() - suffix.size());
        if (id.find('/') != std::string::npos || id == "." || id == "..")
          return send(make_response(req_, http::status::bad_request, error_json("bad session id")));
        if (id == snap->session_id && snap->active)
          return send(make_response(req_, http::status::ok, snap->summary));
        try {
          return send(make_response(req_, http::status::ok,
                                    session_summary(hub_.config().sessions_dir / id)));
        } catch (const Error&) {
          return send(make_response(req_, http::status::not_found,
                                    error_json("unknown session", id)));
        }
      }
      return send(make_response(req_, http::status::not_found, error_json("not found", path)));
    }

    if (method == http::verb::post) {
      const json body = json::parse(req_.body(), nullptr, false);
      if (body.is_discarded())
        return send(make_response(req_, http::status::bad_request, error_json("MalformedJson")));
      auto self = shared_from_this();
      auto later = [self](CommandReply r) { self->reply_later(r.status, std::move(r.body)); };
      if (path == "/api/override") {
        iam::OverrideCommand cmd;
        try {
          cmd = override_from_body(body);
        } catch (const Error& e) {
          return send(make_response(req_, http::status::bad_request,
                                    {{"error", "InvalidOverride"}, {"field", e.field()},
                                     {"detail", e.what()}}));
        }
        hub_.submit_override(std::move(cmd), later);
        return;
      }
      if (path == "/api/plan") {
        cam::TherapyPlan plan;
        try {
          plan = cam::plan_from_json(body);
        } catch (const Error& e) {
          return send(make_response(req_, http::status::bad_request,
                                    {{"error", "InvalidConfig"}, {"detail", e.what()}}));
        }
        hub_.submit_plan(std::move(plan), later);
        return;
      }
      if (path == "/api/ack-alert") {
        const auto id = body.find("id");
        if (!body.is_object() || id == body.end() || !id->is_number_unsigned())
          return send(make_response(req_, http::status::bad_request, error_json("missing alert id")));
        hub_.submit_ack(id->get<std::uint64_t>(), later);
        return;
      }
      return send(make_response(req_, http::status::not_found, error_json("not found", path)));
    }

    Response res = make_response(req_, http::status::method_not_allowed,
                                 error_json("method not allowed"));
    send(std::move(res));
  }

  void send(Response res) {
    auto sp = std::make_shared<Response>(std::move(res));
    const bool keep = sp->keep_alive();
    http::async_write(stream_, *sp,
                      [self = shared_from_this(), sp, keep](beast::error_code ec, std::size_t) {
                        if (ec || !keep) {
                          self->close();
                          return;
                        }
                        self->read();
                      });
  }

  void close() {
    beast::error_code ec;
    stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
    stream_.close();
  }

  beast::tcp_stream stream_;
  Hub& hub_;
  std::function<void(std::shared_ptr<WsSession>)> on_ws_;
  beast::flat_buffer buffer_;
  Request req_;
};

}  // namespace

struct ApiServer::Impl : std::enable_shared_from_this<ApiServer::Impl> {
  Impl(asio::io_context& io, Hub& hub) : acceptor(io), hub(hub) {}

  void accept() {
    acceptor.async_accept([self = shared_from_this()](beast::error_code ec, tcp::socket socket) {
      if (ec) {
        if (ec != asio::error::operation_aborted && !self->stopped) self->accept();
        return;
      }
      std::weak_ptr<Impl> weak = self;
      std::make_shared<HttpSession>(std::move(socket), self->hub,
                                    [weak](std::shared_ptr<WsSession> ws) {
                                      if (auto s = weak.lock()) s->sockets.push_back(ws);
                                    })
          ->run();
      self->accept();
    });
  }

  tcp::acceptor acceptor;
  Hub& hub;
  std::vector<std::weak_ptr<WsSession>> sockets;
  bool stopped = false;
};

ApiServer::ApiServer(asio::io_context& io, Hub& hub, const std::string& address,
                     std::uint16_t port)
    : impl_(std::make_shared<Impl>(io, hub)) {
  const tcp::endpoint ep(asio::ip::make_address(address), port);
  impl_->acceptor.open(ep.protocol());
  impl_->acceptor.set_option(asio::socket_base::reuse_address(true));
  impl_->acceptor.bind(ep);
  impl_->acceptor.listen();
}

ApiServer::~ApiServer() = default;

void ApiServer::start() { impl_->accept(); }

void ApiServer::stop() {
  impl_->stopped = true;
  beast::error_code ec;
  impl_->acceptor.close(ec);
  for (auto& w : impl_->sockets)
    if (auto s = w.lock()) s->close();
  impl_->sockets.clear();
}

std::uint16_t ApiServer::port() const { return impl_->acceptor.local_endpoint().port(); }

}  // namespace blexer::net
