#include "approxifer/net/socket.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <sstream>

namespace approxifer::net {
namespace {

std::string errno_text(const std::string& what) { return what + ": " + std::strerror(errno); }

sockaddr_in resolve(const Endpoint& endpoint) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(endpoint.port);
  if (endpoint.host.empty() || endpoint.host == "0.0.0.0" || endpoint.host == "*") {
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    return addr;
  }
  if (inet_pton(AF_INET, endpoint.host.c_str(), &addr.sin_addr) == 1) return addr;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  if (getaddrinfo(endpoint.host.c_str(), nullptr, &hints, &found) != 0 || found == nullptr) {
    throw SocketError("cannot resolve host " + endpoint.host);
  }
  addr.sin_addr = reinterpret_cast<sockaddr_in*>(found->ai_addr)->sin_addr;
  freeaddrinfo(found);
  return addr;
}

Socket make_tcp_socket() {
  Socket s(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!s.valid()) throw SocketError(errno_text("socket"));
  return s;
}

void set_nodelay(const Socket& s) {
  int one = 1;
  ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

}  // namespace

Endpoint parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon + 1 == text.size()) {
    throw std::invalid_argument("endpoint must be host:port, got '" + text + "'");
  }
  Endpoint e;
  e.host = text.substr(0, colon);
  const std::string port = text.substr(colon + 1);
  std::size_t used = 0;
  unsigned long value = 0;
  try {
    value = std::stoul(port, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != port.size() || value > 65535) throw std::invalid_argument("bad port in endpoint '" + text + "'");
  e.port = static_cast<std::uint16_t>(value);
  return e;
}

std::vector<Endpoint> parse_endpoint_list(const std::string& text) {
  std::vector<Endpoint> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_endpoint(item));
  }
  return out;
}

void Socket::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void Socket::shutdown() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

Socket listen_tcp(const Endpoint& endpoint, int backlog) {
  Socket s = make_tcp_socket();
  int one = 1;
  ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr = resolve(endpoint);
  if (::bind(s.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    throw SocketError(errno_text("bind " + endpoint.str()));
  }
  if (::listen(s.fd(), backlog) != 0) throw SocketError(errno_text("listen"));
  return s;
}

std::uint16_t local_port(const Socket& socket) {
  sockaddr_in addr{};
  socklen_t len = sizeof(addr);
  if (::getsockname(socket.fd(), reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
    throw SocketError(errno_text("getsockname"));
  }
  return ntohs(addr.sin_port);
}

void set_nonblocking(const Socket& socket, bool on) {
  int flags = ::fcntl(socket.fd(), F_GETFL, 0);
  flags = on ? (flags | O_NONBLOCK) : (flags & ~O_NONBLOCK);
  ::fcntl(socket.fd(), F_SETFL, flags);
}

Socket connect_nonblocking(const Endpoint& endpoint) {
  Socket s = make_tcp_socket();
  set_nonblocking(s, true);
  set_nodelay(s);
  sockaddr_in addr = resolve(endpoint);
  if (::connect(s.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 && errno != EINPROGRESS) {
    throw SocketError(errno_text("connect " + endpoint.str()));
  }
  return s;
}

Socket connect_tcp(const Endpoint& endpoint, std::chrono::milliseconds timeout) {
  Socket s = connect_nonblocking(endpoint);
  pollfd pfd{s.fd(), POLLOUT, 0};
  const int ready = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
  if (ready <= 0) throw SocketError("connect " + endpoint.str() + ": timed out");
  int err = 0;
  socklen_t len = sizeof(err);
  ::getsockopt(s.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
  if (err != 0) throw SocketError("connect " + endpoint.str() + ": " + std::strerror(err));
  set_nonblocking(s, false);
  return s;
}

void send_all(const Socket& socket, std::span<const std::uint8_t> bytes) {
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::send(socket.fd(), bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) {
        pollfd pfd{socket.fd(), POLLOUT, 0};
        ::poll(&pfd, 1, 1000);
        continue;
      }
      throw SocketError(errno_text("send"));
    }
    sent += static_cast<std::size_t>(n);
  }
}

bool wait_readable(const Socket& socket, std::chrono::milliseconds timeout) {
  pollfd pfd{socket.fd(), POLLIN, 0};
  const int ready = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
  return ready > 0;
}

}  // namespace approxifer::net
