#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include <boost/asio.hpp>

#include "blexer/wire/codec.hpp"

namespace blexer::net {

namespace asio = boost::asio;
using tcp = asio::ip::tcp;

// A newline-framed TCP connection. Handlers run on the socket's executor;
// send() and close() may be called from any thread.
class LineConnection : public std::enable_shared_from_this<LineConnection> {
 public:
  using LineHandler = std::function<void(std::string_view line)>;
  using CloseHandler = std::function<void(const boost::system::error_code&)>;

  explicit LineConnection(tcp::socket socket);

  void start(LineHandler on_line, CloseHandler on_close);
  void send(std::string bytes);
  void close();

  std::string remote() const { return remote_; }
  std::size_t oversize_frames() const { return framer_.oversize_frames(); }

 private:
  void read();
  void write();
  void finish(const boost::system::error_code& ec);

  tcp::socket socket_;
  std::string remote_;
  wire::LineFramer framer_;
  std::array<char, 8192> buffer_{};
  std::deque<std::string> outbox_;
  LineHandler on_line_;
  CloseHandler on_close_;
  bool writing_ = false;
  bool closed_ = false;
};

}  // namespace blexer::net
