// Blocking POSIX stream sockets carrying wire::Message framing.
#pragma once

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <string>
#include <string_view>

#include "ddugm/wire.hpp"

namespace ddugm::net {

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() { reset(); }
  Fd(Fd&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = o.fd_;
      o.fd_ = -1;
    }
    return *this;
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;

  int get() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

struct Endpoint {
  enum class Kind { tcp, unix_socket } kind = Kind::tcp;
  std::string host;
  std::uint16_t port = 0;
  std::string path;

  std::string str() const {
    return kind == Kind::tcp ? "tcp://" + host + ":" + std::to_string(port) : "unix:" + path;
  }
};

/// Accepts "tcp://host:port" and "unix:/path/to/socket".
inline Endpoint parse_endpoint(std::string_view text) {
  Endpoint ep;
  if (text.starts_with("tcp://")) {
    auto rest = text.substr(6);
    const auto colon = rest.rfind(':');
    if (colon == std::string_view::npos || colon == 0) throw std::invalid_argument("endpoint needs host:port");
    ep.host = std::string(rest.substr(0, colon));
    const std::string port(rest.substr(colon + 1));
    char* end = nullptr;
    const long p = std::strtol(port.c_str(), &end, 10);
    if (port.empty() || *end != '\0' || p <= 0 || p > 65535)
      throw std::invalid_argument("bad port in endpoint '" + std::string(text) + "'");
    ep.port = static_cast<std::uint16_t>(p);
    return ep;
  }
  if (text.starts_with("unix:")) {
    ep.kind = Endpoint::Kind::unix_socket;
    ep.path = std::string(text.substr(5));
    if (ep.path.empty()) throw std::invalid_argument("unix endpoint needs a path");
    return ep;
  }
  throw std::invalid_argument("endpoint must start with tcp:// or unix:, got '" + std::string(text) + "'");
}

inline void set_timeout(int fd, double seconds) {
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(seconds);
  tv.tv_usec = static_cast<suseconds_t>((seconds - static_cast<double>(tv.tv_sec)) * 1e6);
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
  ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
}

inline Fd connect_to(const Endpoint& ep, double timeout_seconds) {
  if (ep.kind == Endpoint::Kind::unix_socket) {
    Fd fd(::socket(AF_UNIX, SOCK_STREAM, 0));
    if (!fd.valid()) throw TransportError("socket(): " + std::string(std::strerror(errno)));
    sockaddr_un addr{};
    addr.sun_family = AF_UNIX;
    if (ep.path.size() >= sizeof addr.sun_path) throw std::invalid_argument("unix socket path too long");
    std::memcpy(addr.sun_path, ep.path.c_str(), ep.path.size() + 1);
    if (::connect(fd.get(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
      throw TransportError("connect " + ep.str() + ": " + std::strerror(errno));
    set_timeout(fd.get(), timeout_seconds);
    return fd;
  }
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const std::string port = std::to_string(ep.port);
  if (int rc = ::getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &found); rc != 0)
    throw TransportError("resolve " + ep.str() + ": " + ::gai_strerror(rc));
  std::string last_error = "no addresses";
  for (addrinfo* ai = found; ai; ai = ai->ai_next) {
    Fd fd(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
    if (!fd.valid()) continue;
    if (::connect(fd.get(), ai->ai_addr, ai->ai_addrlen) == 0) {
      ::freeaddrinfo(found);
      int one = 1;
      ::setsockopt(fd.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      set_timeout(fd.get(), timeout_seconds);
      return fd;
    }
    last_error = std::strerror(errno);
  }
  ::freeaddrinfo(found);
  throw TransportError("connect " + ep.str() + ": " + last_error);
}

inline void write_all(int fd, const wire::Bytes& bytes) {
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::send(fd, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw TransportError("send: " + std::string(n < 0 ? std::strerror(errno) : "connection closed"));
    sent += static_cast<std::size_t>(n);
  }
}

/// Returns false on clean EOF before the first byte.
inline bool read_exact(int fd, std::uint8_t* dst, std::size_t count, bool eof_ok = false) {
  std::size_t got = 0;
  while (got < count) {
    const ssize_t n = ::recv(fd, dst + got, count - got, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n == 0 && got == 0 && eof_ok) return false;
    if (n <= 0) throw TransportError("recv: " + std::string(n < 0 ? std::strerror(errno) : "connection closed"));
    got += static_cast<std::size_t>(n);
  }
  return true;
}

inline void write_message(int fd, const wire::Message& msg) { write_all(fd, wire::encode(msg)); }

/// Reads one framed message; std::nullopt on clean EOF between messages.
inline std::optional<wire::Message> read_message(int fd) {
  std::uint8_t len[8];
  if (!read_exact(fd, len, 8, true)) return std::nullopt;
  const std::uint64_t hlen = wire::get_u64(len);
  if (hlen > wire::kMaxHeaderBytes) throw ProtocolError("wire: header length " + std::to_string(hlen) + " too large");
  std::string header(hlen, '\0');
  read_exact(fd, reinterpret_cast<std::uint8_t*>(header.data()), hlen);
  read_exact(fd, len, 8);
  const std::uint64_t plen = wire::get_u64(len);
  if (plen > wire::kMaxPayloadBytes) throw ProtocolError("wire: payload length " + std::to_string(plen) + " too large");
  wire::Message msg;
  msg.payload.resize(plen);
  if (plen) read_exact(fd, msg.payload.data(), plen);
  try {
    msg.header = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("wire: header is not valid JSON: ") + e.what());
  }
  return msg;
}

}  // namespace ddugm::net
