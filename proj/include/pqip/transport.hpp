#pragma once

#include "pqip/wire.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <string>
#include <thread>

namespace pqip {

inline constexpr std::chrono::milliseconds kDefaultMessageTimeout{30000};

/// Newline-delimited frames over a pair of file descriptors (a pipe pair,
/// stdin/stdout, or both ends of one socket).
class FdChannel {
 public:
  FdChannel(int in_fd, int out_fd, bool owns = false, std::chrono::milliseconds timeout = kDefaultMessageTimeout)
      : in_(in_fd), out_(out_fd), owns_(owns), timeout_(timeout) {
    // A vanished peer should surface as EPIPE, not kill the process.
    std::signal(SIGPIPE, SIG_IGN);
  }
  FdChannel(const FdChannel&) = delete;
  FdChannel& operator=(const FdChannel&) = delete;
  FdChannel(FdChannel&& o) noexcept
      : in_(o.in_), out_(o.out_), owns_(o.owns_), timeout_(o.timeout_), buf_(std::move(o.buf_)) {
    o.owns_ = false;
  }
  ~FdChannel() { close(); }

  void set_timeout(std::chrono::milliseconds t) { timeout_ = t; }

  void close() {
    if (!owns_) return;
    ::close(in_);
    if (out_ != in_) ::close(out_);
    owns_ = false;
  }

  void write_line(const std::string& line) {
    std::string data = line + '\n';
    std::size_t off = 0;
    while (off < data.size()) {
      const auto n = ::write(out_, data.data() + off, data.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ChannelError(std::string("write failed: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  /// Next line without its newline. Throws ChannelError on EOF, error or
  /// when no complete line arrives within the timeout.
  std::string read_line() {
    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    for (;;) {
      if (auto nl = buf_.find('\n'); nl != std::string::npos) {
        std::string line = buf_.substr(0, nl);
        buf_.erase(0, nl + 1);
        return line;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) throw ChannelError("timed out waiting for peer");
      pollfd pfd{in_, POLLIN, 0};
      const int rc = ::poll(&pfd, 1, static_cast<int>(left.count()));
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw ChannelError(std::string("poll failed: ") + std::strerror(errno));
      }
      if (rc == 0) continue;
      char chunk[4096];
      const auto n = ::read(in_, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        throw ChannelError(std::string("read failed: ") + std::strerror(errno));
      }
      if (n == 0) throw ChannelError("peer closed the connection");
      buf_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int in_;
  int out_;
  bool owns_;
  std::chrono::milliseconds timeout_;
  std::string buf_;
};

// ---------------------------------------------------------------------------
// TCP
// ---------------------------------------------------------------------------

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;
};

/// Parses "host:port" (the host may be empty, meaning all interfaces for
/// listeners and localhost for connectors).
inline Endpoint parse_endpoint(std::string_view s) {
  const auto colon = s.rfind(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("endpoint must be host:port");
  Endpoint e;
  e.host = std::string(s.substr(0, colon));
  const auto port = std::string(s.substr(colon + 1));
  std::size_t used = 0;
  unsigned long p = 0;
  try {
    p = std::stoul(port, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != port.size() || port.empty() || p > 65535) throw std::invalid_argument("bad port in endpoint '" + std::string(s) + "'");
  e.port = static_cast<std::uint16_t>(p);
  return e;
}

namespace detail {

inline addrinfo* resolve(const Endpoint& e, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(e.port);
  const char* host = e.host.empty() ? (passive ? nullptr : "127.0.0.1") : e.host.c_str();
  if (const int rc = ::getaddrinfo(host, port.c_str(), &hints, &res); rc != 0)
    throw ChannelError(std::string("cannot resolve '") + e.host + "': " + ::gai_strerror(rc));
  return res;
}

inline void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

}  // namespace detail

/// A bound, listening socket. port() reports the actual port (useful with 0).
class TcpListener {
 public:
  explicit TcpListener(const Endpoint& e) {
    addrinfo* res = detail::resolve(e, true);
    for (addrinfo* a = res; a; a = a->ai_next) {
      fd_ = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
      if (fd_ < 0) continue;
      int one = 1;
      ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
      if (::bind(fd_, a->ai_addr, a->ai_addrlen) == 0 && ::listen(fd_, 1) == 0) break;
      ::close(fd_);
      fd_ = -1;
    }
    ::freeaddrinfo(res);
    if (fd_ < 0) throw ChannelError("cannot listen on port " + std::to_string(e.port) + ": " + std::strerror(errno));
  }
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;
  ~TcpListener() {
    if (fd_ >= 0) ::close(fd_);
  }

  std::uint16_t port() const {
    sockaddr_storage ss{};
    socklen_t len = sizeof ss;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&ss), &len);
    if (ss.ss_family == AF_INET6) return ntohs(reinterpret_cast<sockaddr_in6*>(&ss)->sin6_port);
    return ntohs(reinterpret_cast<sockaddr_in*>(&ss)->sin_port);
  }

  FdChannel accept(std::chrono::milliseconds timeout = kDefaultMessageTimeout) {
    pollfd pfd{fd_, POLLIN, 0};
    int rc;
    do rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
    while (rc < 0 && errno == EINTR);
    if (rc <= 0) throw ChannelError("no peer connected before the timeout");
    const int c = ::accept(fd_, nullptr, nullptr);
    if (c < 0) throw ChannelError(std::string("accept failed: ") + std::strerror(errno));
    detail::set_nodelay(c);
    return FdChannel(c, c, true, timeout);
  }

 private:
  int fd_ = -1;
};

/// Connects, retrying until the timeout so the peer may start listening later.
inline FdChannel tcp_connect(const Endpoint& e, std::chrono::milliseconds timeout = kDefaultMessageTimeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    addrinfo* res = detail::resolve(e, false);
    for (addrinfo* a = res; a; a = a->ai_next) {
      const int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) {
        ::freeaddrinfo(res);
        detail::set_nodelay(fd);
        return FdChannel(fd, fd, true, timeout);
      }
      ::close(fd);
    }
    ::freeaddrinfo(res);
    if (std::chrono::steady_clock::now() >= deadline)
      throw ChannelError("cannot connect to " + e.host + ":" + std::to_string(e.port));
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
}

// ---------------------------------------------------------------------------
// Remote sessions
// ---------------------------------------------------------------------------

/// Verifier-side link to a prover on the other end of a channel.
template <PrimeField F>
class RemoteProverLink : public ProverLink<F> {
 public:
  RemoteProverLink(FdChannel& ch, WireCodec<F> codec) : ch_(&ch), codec_(std::move(codec)) {}
  void send(const Message<F>& m) override { ch_->write_line(codec_.encode(m)); }
  Message<F> receive() override {
    const auto line = ch_->read_line();
    try {
      return codec_.decode(line);
    } catch (const DecodeError& e) {
      throw ChannelError(std::string("bad frame from prover: ") + e.what());
    }
  }

 private:
  FdChannel* ch_;
  WireCodec<F> codec_;
};

template <PrimeField F>
Decision<F> run_remote_verifier(const QcmaInstance& inst, const F& field, const Seed& seed, FdChannel& ch) {
  QcmaVerifier<F> verifier(inst, field, seed);
  RemoteProverLink<F> link(ch, WireCodec<F>(field, session_id(seed, circuit_hash(inst.circuit()))));
  return drive_verifier(verifier, link);
}

/// Prover side: answer frames until the verdict arrives. Returns nullopt on
/// an undecodable frame; transport failures propagate as ChannelError.
template <PrimeField F>
std::optional<FinalVerdict> serve_prover(QcmaProver<F>& prover, const F& field, FdChannel& ch) {
  WireCodec<F> codec(field);
  for (;;) {
    Message<F> in;
    try {
      in = codec.decode(ch.read_line());
    } catch (const DecodeError& e) {
      if (!codec.sid().empty()) ch.write_line(codec.encode(ErrorMessage{"channel", e.what()}));
      return std::nullopt;
    }
    if (const auto* v = std::get_if<FinalVerdict>(&in)) return *v;
    for (const auto& out : prover.handle(in)) ch.write_line(codec.encode(out));
  }
}

}  // namespace pqip
