// Copyright 2026 The khtree Authors
//
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
#include <cstdint>
#include <functional>
#include <list>
#include <mutex>
#include <string>
#include <thread>

#include "kht/services.hpp"

namespace kht::net {

/// "host:port"; host may be omitted (":7000" binds all interfaces).
struct Address {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  static Address parse(const std::string& s);
  std::string str() const { return host + ":" + std::to_string(port); }
};

/// Accepts connections and answers length-prefixed frames with `handler`.
/// One thread per connection; a frame over 16 MiB gets PROTO_OVERSIZE and the
/// connection is closed.
class FrameServer {
 public:
  using Handler = std::function<Bytes(ByteView)>;

  FrameServer(const Address& bind, Handler handler);
  ~FrameServer();
  FrameServer(const FrameServer&) = delete;
  FrameServer& operator=(const FrameServer&) = delete;

  /// Actual port (useful when binding port 0).
  std::uint16_t port() const { return port_; }
  void stop();
  /// Blocks until stop() is called from another thread.
  void wait();

 private:
  void accept_loop();
  void serve(int fd);

  Handler handler_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex mu_;
  std::list<std::thread> workers_;
  std::list<int> conns_;
};

/// Client side: one persistent connection, reconnecting on demand.
class TcpEndpoint : public Endpoint {
 public:
  explicit TcpEndpoint(Address addr) : addr_(std::move(addr)) {}
  ~TcpEndpoint() override;
  Bytes call(ByteView request_body) override;

 private:
  void connect();
  Address addr_;
  int fd_ = -1;
};

}  // namespace kht::net
