#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace approxifer::net {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  std::string str() const { return host + ":" + std::to_string(port); }
};

// "host:port"
Endpoint parse_endpoint(const std::string& text);
// Comma-separated list of "host:port".
std::vector<Endpoint> parse_endpoint_list(const std::string& text);

class SocketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Owning file descriptor for a TCP socket.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket() { close(); }
  Socket(Socket&& other) noexcept : fd_(other.release()) {}
  Socket& operator=(Socket&& other) noexcept {
    if (this != &other) {
      close();
      fd_ = other.release();
    }
    return *this;
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  int release() {
    int fd = fd_;
    fd_ = -1;
    return fd;
  }
  void close();
  void shutdown();

 private:
  int fd_ = -1;
};

// Bound, listening socket. Port 0 picks an ephemeral port; see local_port().
Socket listen_tcp(const Endpoint& endpoint, int backlog = 64);
std::uint16_t local_port(const Socket& socket);

// Blocking connect with a timeout.
Socket connect_tcp(const Endpoint& endpoint, std::chrono::milliseconds timeout);
// Starts a non-blocking connect; completion is signalled by writability.
Socket connect_nonblocking(const Endpoint& endpoint);

void set_nonblocking(const Socket& socket, bool on);

void send_all(const Socket& socket, std::span<const std::uint8_t> bytes);

// Waits until readable; false on timeout.
bool wait_readable(const Socket& socket, std::chrono::milliseconds timeout);

}  // namespace approxifer::net
