// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "caslite/wire.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <utility>

namespace caslite {

namespace {

Error io_error(const std::string& what) {
  return Error(ErrorCode::Io, what + ": " + std::strerror(errno));
}

class Socket {
 public:
  explicit Socket(int fd = -1) : fd_(fd) {}
  ~Socket() {
    if (fd_ >= 0) ::close(fd_);
  }
  Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Socket& operator=(Socket&& o) noexcept {
    if (this != &o) {
      if (fd_ >= 0) ::close(fd_);
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  int get() const { return fd_; }
  int release() { return std::exchange(fd_, -1); }

 private:
  int fd_;
};

// Returns false on orderly EOF before the first byte.
bool read_exact(int fd, char* buf, std::size_t len) {
  std::size_t got = 0;
  while (got < len) {
    ssize_t n = ::recv(fd, buf + got, len - got, 0);
    if (n == 0) {
      if (got == 0) return false;
      throw Error(ErrorCode::Io, "connection closed mid-frame");
    }
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) throw Error(ErrorCode::Io, "timed out");
      throw io_error("recv");
    }
    got += static_cast<std::size_t>(n);
  }
  return true;
}

void write_all(int fd, std::string_view data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw io_error("send");
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::uint32_t decode_length(const char* b) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(b[0])) << 24 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[1])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[2])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[3]));
}

struct AddrInfo {
  addrinfo* head = nullptr;
  ~AddrInfo() {
    if (head) ::freeaddrinfo(head);
  }
};

void resolve(const Endpoint& ep, bool passive, AddrInfo& out) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  std::string port = std::to_string(ep.port);
  int rc = ::getaddrinfo(ep.host.empty() ? nullptr : ep.host.c_str(), port.c_str(), &hints, &out.head);
  if (rc != 0) throw Error(ErrorCode::Io, "cannot resolve " + ep.str() + ": " + ::gai_strerror(rc));
}

void set_timeout(int fd, std::chrono::milliseconds timeout) {
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
  tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
  ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
}

}  // namespace

Endpoint Endpoint::parse(std::string_view text) {
  std::size_t colon = text.rfind(':');
  if (colon == std::string_view::npos || colon + 1 == text.size()) {
    throw Error(ErrorCode::Malformed, "endpoint must be HOST:PORT, got '" + std::string(text) + "'");
  }
  std::string port_text(text.substr(colon + 1));
  unsigned long port = 0;
  try {
    std::size_t used = 0;
    port = std::stoul(port_text, &used);
    if (used != port_text.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw Error(ErrorCode::Malformed, "invalid port in '" + std::string(text) + "'");
  }
  if (port > 65535) throw Error(ErrorCode::Malformed, "port out of range in '" + std::string(text) + "'");
  return Endpoint{std::string(text.substr(0, colon)), static_cast<std::uint16_t>(port)};
}

std::string encode_frame(std::string_view payload) {
  if (payload.size() > kMaxFrameBytes) throw Error(ErrorCode::Malformed, "frame too large");
  auto n = static_cast<std::uint32_t>(payload.size());
  std::string out;
  out.reserve(4 + payload.size());
  out.push_back(static_cast<char>(n >> 24));
  out.push_back(static_cast<char>(n >> 16));
  out.push_back(static_cast<char>(n >> 8));
  out.push_back(static_cast<char>(n));
  out.append(payload);
  return out;
}

Json ok_response(Json body) { return Json{{"ok", true}, {"body", std::move(body)}}; }

Json error_response(ErrorCode code, const std::string& message, Json extra) {
  Json err = std::move(extra);
  err["code"] = error_code_name(code);
  err["message"] = message;
  return Json{{"ok", false}, {"error", std::move(err)}};
}

Json error_response(const Error& e) { return error_response(e.code(), e.detail()); }

Json unwrap_response(const Json& response, Json* remote_error) {
  if (field::boolean(response, "ok")) return field::require(response, "body");
  const Json& err = field::require(response, "error");
  if (remote_error) *remote_error = err;
  std::string code = field::string(err, "code");
  auto parsed = error_code_from_name(code);
  throw Error(parsed.value_or(ErrorCode::Internal), field::string(err, "message"));
}

Json make_request(std::string_view kind, Json payload, const Json* chain) {
  Json req{{"kind", kind}, {"payload", std::move(payload)}};
  if (chain) req["chain"] = *chain;
  return req;
}

Json call(const Endpoint& endpoint, const Json& request, std::chrono::milliseconds timeout) {
  AddrInfo ai;
  resolve(endpoint, false, ai);
  Socket sock;
  int last_errno = 0;
  for (addrinfo* p = ai.head; p; p = p->ai_next) {
    Socket s(::socket(p->ai_family, p->ai_socktype | SOCK_CLOEXEC, p->ai_protocol));
    if (s.get() < 0) continue;
    set_timeout(s.get(), timeout);
    if (::connect(s.get(), p->ai_addr, p->ai_addrlen) == 0) {
      sock = Socket(s.release());
      break;
    }
    last_errno = errno;
  }
  if (sock.get() < 0) {
    errno = last_errno;
    throw io_error("cannot connect to " + endpoint.str());
  }
  write_all(sock.get(), encode_frame(canonical(request)));
  char header[4];
  if (!read_exact(sock.get(), header, 4)) throw Error(ErrorCode::Io, "connection closed by " + endpoint.str());
  std::uint32_t len = decode_length(header);
  if (len > kMaxFrameBytes) throw Error(ErrorCode::Io, "oversized response frame");
  std::string body(len, '\0');
  if (len > 0 && !read_exact(sock.get(), body.data(), len)) throw Error(ErrorCode::Io, "truncated response");
  try {
    return parse_canonical(body);
  } catch (const Error& e) {
    throw Error(ErrorCode::Io, std::string("bad response frame: ") + e.what());
  }
}

FrameServer::FrameServer(Endpoint listen, Handler handler)
    : listen_(std::move(listen)), bound_(listen_), handler_(std::move(handler)) {}

FrameServer::~FrameServer() { stop(); }

void FrameServer::start() {
  AddrInfo ai;
  resolve(listen_, true, ai);
  Socket sock;
  for (addrinfo* p = ai.head; p; p = p->ai_next) {
    Socket s(::socket(p->ai_family, p->ai_socktype | SOCK_CLOEXEC, p->ai_protocol));
    if (s.get() < 0) continue;
    int one = 1;
    ::setsockopt(s.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(s.get(), p->ai_addr, p->ai_addrlen) == 0 && ::listen(s.get(), 128) == 0) {
      sock = Socket(s.release());
      break;
    }
  }
  if (sock.get() < 0) throw io_error("cannot listen on " + listen_.str());

  sockaddr_storage addr{};
  socklen_t len = sizeof addr;
  ::getsockname(sock.get(), reinterpret_cast<sockaddr*>(&addr), &len);
  if (addr.ss_family == AF_INET) {
    bound_.port = ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
  } else if (addr.ss_family == AF_INET6) {
    bound_.port = ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
  }
  listen_fd_ = sock.release();
  stopping_ = false;
  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
}

void FrameServer::stop() {
  if (!running_.exchange(false)) return;
  stopping_ = true;
  if (acceptor_.joinable()) acceptor_.join();
  ::close(listen_fd_);
  listen_fd_ = -1;
  {
    // Unblock idle readers; a request being handled still gets its reply.
    std::lock_guard<std::mutex> lock(conns_mu_);
    for (auto& c : conns_) {
      if (!c->done) ::shutdown(c->fd, SHUT_RD);
    }
  }
  reap(true);
}

void FrameServer::accept_loop() {
  while (!stopping_) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    int rc = ::poll(&pfd, 1, 50);
    reap(false);
    if (rc <= 0) continue;
    int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) continue;
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    std::lock_guard<std::mutex> lock(conns_mu_);
    auto conn = std::make_unique<Connection>();
    conn->fd = fd;
    Connection* raw = conn.get();
    conns_.push_back(std::move(conn));
    raw->worker = std::thread([this, raw] { serve_connection(*raw); });
  }
}

void FrameServer::serve_connection(Connection& conn) {
  try {
    while (!stopping_) {
      char header[4];
      if (!read_exact(conn.fd, header, 4)) break;
      std::uint32_t len = decode_length(header);
      if (len > kMaxFrameBytes) {
        write_all(conn.fd, encode_frame(canonical(error_response(ErrorCode::Malformed, "frame too large"))));
        break;  // the stream cannot be resynchronised
      }
      std::string body(len, '\0');
      if (len > 0 && !read_exact(conn.fd, body.data(), len)) break;
      Json response;
      try {
        response = handler_(parse_canonical(body));
      } catch (const Error& e) {
        response = error_response(e);
      } catch (const std::exception& e) {
        response = error_response(ErrorCode::Internal, e.what());
      }
      write_all(conn.fd, encode_frame(canonical(response)));
    }
  } catch (const std::exception&) {
    // Peer went away; nothing to report to.
  }
  std::lock_guard<std::mutex> lock(conns_mu_);
  ::close(conn.fd);
  conn.done = true;
}

void FrameServer::reap(bool all) {
  std::list<std::unique_ptr<Connection>> finished;
  {
    std::lock_guard<std::mutex> lock(conns_mu_);
    for (auto it = conns_.begin(); it != conns_.end();) {
      if (all || (*it)->done) {
        finished.push_back(std::move(*it));
        it = conns_.erase(it);
      } else {
        ++it;
      }
    }
  }
  for (auto& c : finished) {
    if (c->worker.joinable()) c->worker.join();
  }
}

std::unique_ptr<FrameServer> serve_frames(const Endpoint& listen,
                                          std::function<Json(const Json&, Timestamp)> handler,
                                          Clock clock) {
  auto server = std::make_unique<FrameServer>(
      listen, [handler = std::move(handler), clock = std::move(clock)](const Json& request) {
        return handler(request, clock());
      });
  server->start();
  return server;
}

}  // namespace caslite
