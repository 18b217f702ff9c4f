#include "blexer/net/line_connection.hpp"

namespace blexer::net {

LineConnection::LineConnection(tcp::socket socket) : socket_(std::move(socket)) {
  boost::system::error_code ec;
  const auto ep = socket_.remote_endpoint(ec);
  remote_ = ec ? "?" : ep.address().to_string() + ":" + std::to_string(ep.port());
  socket_.set_option(tcp::no_delay(true), ec);
}

void LineConnection::start(LineHandler on_line, CloseHandler on_close) {
  on_line_ = std::move(on_line);
  on_close_ = std::move(on_close);
  read();
}

void LineConnection::read() {
  socket_.async_read_some(asio::buffer(buffer_), [self = shared_from_this()](
                                                     const boost::system::error_code& ec,
                                                     std::size_t n) {
    if (ec) {
      self->finish(ec);
      return;
    }
    self->framer_.feed(std::string_view(self->buffer_.data(), n), [&](std::string_view line) {
      if (!self->closed_ && self->on_line_) self->on_line_(line);
    });
    if (!self->closed_) self->read();
  });
}

void LineConnection::send(std::string bytes) {
  asio::post(socket_.get_executor(), [self = shared_from_this(), b = std::move(bytes)]() mutable {
    if (self->closed_) return;
    self->outbox_.push_back(std::move(b));
    if (!self->writing_) self->write();
  });
}

void LineConnection::write() {
  writing_ = true;
  asio::async_write(socket_, asio::buffer(outbox_.front()),
                    [self = shared_from_this()](const boost::system::error_code& ec, std::size_t) {
                      if (ec) {
                        self->writing_ = false;
                        self->finish(ec);
                        return;
                      }
                      self->outbox_.pop_front();
                      if (!self->outbox_.empty() && !self->closed_)
                        self->write();
                      else
                        self->writing_ = false;
                    });
}

void LineConnection::close() {
  asio::post(socket_.get_executor(), [self = shared_from_this()] {
    // Let queued bytes (a BYE, an error reply) go out before the socket
    // closes.
    if (self->writing_) {
      asio::post(self->socket_.get_executor(), [self] { self->close(); });
      return;
    }
    self->finish(asio::error::operation_aborted);
  });
}

void LineConnection::finish(const boost::system::error_code& ec) {
  if (closed_) return;
  closed_ = true;
  boost::system::error_code ignored;
  socket_.shutdown(tcp::socket::shutdown_both, ignored);
  socket_.close(ignored);
  outbox_.clear();
  if (on_close_) {
    auto cb = std::move(on_close_);
    cb(ec);
  }
  on_line_ = nullptr;
}

}  // namespace blexer::net
