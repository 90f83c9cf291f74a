#include "ttd/proto/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>

#include "ttd/proto/views.hpp"

namespace ttd::proto {

struct Server::Connection : Peer {
  int fd = -1;
  std::mutex write_mu;
  std::thread thread;
  std::atomic<bool> open{true};
  std::atomic<bool> done{false};

  void send(const json& message) override {
    std::string line = dump_line(message) + "\n";
    std::lock_guard lock(write_mu);
    size_t off = 0;
    while (off < line.size() && open) {
      ssize_t n = ::send(fd, line.data() + off, line.size() - off, MSG_NOSIGNAL);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) {
        open = false;
        return;
      }
      off += static_cast<size_t>(n);
    }
  }
};

Server::Server(ProtocolEngine& engine) : engine_(engine) {}

Server::~Server() { stop(); }

void Server::start(uint16_t port) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 ||
      ::listen(listen_fd_, 16) < 0) {
    std::string err = std::strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw std::runtime_error("cannot listen on port " + std::to_string(port) + ": " + err);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
}

void Server::accept_loop() {
  while (running_) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      break;
    }
    auto c = std::make_shared<Connection>();
    c->fd = fd;
    std::lock_guard lock(conns_mu_);
    if (!running_) {
      ::close(fd);
      break;
    }
    // Reap connections whose threads have finished.
    for (auto it = conns_.begin(); it != conns_.end();) {
      if ((*it)->done) {
        (*it)->thread.join();
        ::close((*it)->fd);
        it = conns_.erase(it);
      } else {
        ++it;
      }
    }
    conns_.push_back(c);
    c->thread = std::thread([this, c] { serve(c); });
  }
}

void Server::serve(std::shared_ptr<Connection> c) {
  c->send(ProtocolEngine::hello());
  std::string buf;
  char chunk[4096];
  while (c->open) {
    ssize_t n = ::recv(c->fd, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    buf.append(chunk, static_cast<size_t>(n));
    size_t start = 0;
    for (size_t nl; (nl = buf.find('\n', start)) != std::string::npos; start = nl + 1) {
      std::string_view line(buf.data() + start, nl - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!line.empty()) engine_.handle_line(*c, line);
    }
    buf.erase(0, start);
    if (buf.size() > kMaxLineBytes) {
      c->send({{"id", nullptr}, {"ok", false},
               {"error", {{"code", kInvalidRequest}, {"name", error_name(kInvalidRequest)},
                          {"message", "line too long"}}}});
      break;
    }
  }
  c->open = false;
  engine_.disconnect(*c);
  ::shutdown(c->fd, SHUT_RDWR);
  c->done = true;
}

void Server::wait() {
  if (acceptor_.joinable()) acceptor_.join();
}

void Server::interrupt() {
  if (listen_fd_ >= 0) ::shutdown(listen_fd_, SHUT_RDWR);
}

void Server::stop() {
  if (!running_.exchange(false)) {
    if (acceptor_.joinable()) acceptor_.join();
    return;
  }
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  if (acceptor_.joinable() && acceptor_.get_id() != std::this_thread::get_id()) acceptor_.join();
  std::list<std::shared_ptr<Connection>> conns;
  {
    std::lock_guard lock(conns_mu_);
    conns.swap(conns_);
  }
  for (auto& c : conns) ::shutdown(c->fd, SHUT_RDWR);
  for (auto& c : conns) {
    if (c->thread.joinable()) c->thread.join();
    ::close(c->fd);
  }
}

}  // namespace ttd::proto
