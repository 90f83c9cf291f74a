#pragma once

#include <atomic>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "ttd/proto/protocol.hpp"

namespace ttd::proto {

inline constexpr size_t kMaxLineBytes = 1 << 20;

// Newline-delimited JSON over TCP on 127.0.0.1, one thread per connection.
class Server {
 public:
  explicit Server(ProtocolEngine& engine);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and starts accepting. Port 0 picks a free port. Throws std::runtime_error.
  void start(uint16_t port);
  uint16_t port() const { return port_; }
  // Blocks until stop() is called from another thread.
  void wait();
  void stop();
  // Async-signal-safe: makes wait() return. Call stop() afterwards.
  void interrupt();

 private:
  struct Connection;

  ProtocolEngine& engine_;
  int listen_fd_ = -1;
  uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::thread acceptor_;
  std::mutex conns_mu_;
  std::list<std::shared_ptr<Connection>> conns_;

  void accept_loop();
  void serve(std::shared_ptr<Connection> c);
};

}  // namespace ttd::proto
