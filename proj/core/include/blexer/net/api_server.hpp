#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include <boost/asio/io_context.hpp>

namespace blexer::net {

class Hub;

// HTTP routes under /api and the /ws/live event stream, on one port.
// Runs on the hub's io_context.
class ApiServer {
 public:
  ApiServer(boost::asio::io_context& io, Hub& hub, const std::string& address,
            std::uint16_t port);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  void start();
  void stop();
  std::uint16_t port() const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace blexer::net
