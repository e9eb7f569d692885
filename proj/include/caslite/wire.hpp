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

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "caslite/encoding.hpp"
#include "caslite/error.hpp"
#include "caslite/time.hpp"

namespace caslite {

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;

  // "HOST:PORT"
  static Endpoint parse(std::string_view text);
  std::string str() const { return host + ":" + std::to_string(port); }
};

// Frames are a 4-byte big-endian length followed by one canonical JSON
// document.
inline constexpr std::size_t kMaxFrameBytes = 16u << 20;

std::string encode_frame(std::string_view payload);

// Response documents: {"ok": true, "body": ...} or
// {"ok": false, "error": {"code": ..., "message": ...}}.
Json ok_response(Json body);
Json error_response(ErrorCode code, const std::string& message, Json extra = Json::object());
Json error_response(const Error& e);
// Returns the body of an ok response or throws Error carrying the remote code.
// Extra error fields are kept in `remote_error` for callers that want them.
Json unwrap_response(const Json& response, Json* remote_error = nullptr);

// Request documents: {"kind": ..., "payload": {...}} plus "chain" when the
// caller authenticates.
Json make_request(std::string_view kind, Json payload, const Json* chain = nullptr);

// Sends one request on a fresh connection and waits for the reply.
// Connection and transport failures throw Error(Io).
Json call(const Endpoint& endpoint, const Json& request,
          std::chrono::milliseconds timeout = std::chrono::seconds(10));

// Thread-per-connection TCP server. A connection may carry several requests
// in sequence; a malformed frame gets an error response and the connection
// stays usable.
class FrameServer {
 public:
  using Handler = std::function<Json(const Json& request)>;

  FrameServer(Endpoint listen, Handler handler);
  ~FrameServer();
  FrameServer(const FrameServer&) = delete;
  FrameServer& operator=(const FrameServer&) = delete;

  // Binds and starts accepting; throws Error(Io) on bind failure. Port 0
  // picks an ephemeral port, visible through endpoint().
  void start();
  // Stops accepting, lets in-flight requests finish, then returns.
  void stop();

  Endpoint endpoint() const { return bound_; }
  bool running() const { return running_; }

 private:
  struct Connection {
    int fd;
    std::thread worker;
    std::atomic<bool> done{false};
  };

  void accept_loop();
  void serve_connection(Connection& conn);
  void reap(bool all);

  Endpoint listen_;
  Endpoint bound_;
  Handler handler_;
  int listen_fd_ = -1;
  std::atomic<bool> running_{false};
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex conns_mu_;
  std::list<std::unique_ptr<Connection>> conns_;
};

// A started server answering with `handler(request, clock())`.
std::unique_ptr<FrameServer> serve_frames(const Endpoint& listen,
                                          std::function<Json(const Json&, Timestamp)> handler,
                                          Clock clock = system_clock());

}  // namespace caslite
