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

#include "kht/net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace kht::net {

namespace {

std::string sys_error(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

bool read_exact(int fd, std::uint8_t* buf, std::size_t n) {
  std::size_t done = 0;
  while (done < n) {
    const ssize_t r = ::recv(fd, buf + done, n - done, 0);
    if (r == 0) return false;
    if (r < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    done += static_cast<std::size_t>(r);
  }
  return true;
}

bool write_all(int fd, ByteView b) {
  std::size_t done = 0;
  while (done < b.size()) {
    const ssize_t r = ::send(fd, b.data() + done, b.size() - done, MSG_NOSIGNAL);
    if (r < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    done += static_cast<std::size_t>(r);
  }
  return true;
}

std::uint32_t be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

}  // namespace

Address Address::parse(const std::string& s) {
  const auto colon = s.rfind(':');
  if (colon == std::string::npos) throw std::invalid_argument("address must be host:port: " + s);
  Address a;
  a.host = s.substr(0, colon);
  const int port = std::stoi(s.substr(colon + 1));
  if (port < 0 || port > 65535) throw std::invalid_argument("port out of range: " + s);
  a.port = static_cast<std::uint16_t>(port);
  return a;
}

FrameServer::FrameServer(const Address& bind, Handler handler) : handler_(std::move(handler)) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (listen_fd_ < 0) throw TransportError(sys_error("socket"));
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons(bind.port);
  if (bind.host.empty() || bind.host == "0.0.0.0") {
    sa.sin_addr.s_addr = htonl(INADDR_ANY);
  } else if (::inet_pton(AF_INET, bind.host == "localhost" ? "127.0.0.1" : bind.host.c_str(), &sa.sin_addr) != 1) {
    ::close(listen_fd_);
    throw TransportError("bad bind address " + bind.host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0 || ::listen(listen_fd_, 64) != 0) {
    const std::string err = sys_error("bind/listen");
    ::close(listen_fd_);
    throw TransportError(err);
  }
  socklen_t len = sizeof sa;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&sa), &len);
  port_ = ntohs(sa.sin_port);
  acceptor_ = std::thread([this] { accept_loop(); });
}

FrameServer::~FrameServer() {
  stop();
  if (acceptor_.joinable()) acceptor_.join();
  std::list<std::thread> workers;
  {
    std::lock_guard lock(mu_);
    workers.swap(workers_);
  }
  for (auto& t : workers) t.join();
}

void FrameServer::stop() {
  if (stopping_.exchange(true)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  std::lock_guard lock(mu_);
  for (int fd : conns_) ::shutdown(fd, SHUT_RDWR);
}

void FrameServer::wait() {
  if (acceptor_.joinable()) acceptor_.join();
}

void FrameServer::accept_loop() {
  while (!stopping_) {
    const int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) {
      if (errno == EINTR) continue;
      if (stopping_) break;
      continue;
    }
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    std::lock_guard lock(mu_);
    conns_.push_back(fd);
    workers_.emplace_back([this, fd] { serve(fd); });
  }
}

void FrameServer::serve(int fd) {
  std::uint8_t hdr[4];
  while (!stopping_ && read_exact(fd, hdr, 4)) {
    const std::uint32_t len = be32(hdr);
    if (len > wire::kMaxFrame) {
      const Bytes reply = wire::frame(Bytes{static_cast<std::uint8_t>(wire::Status::ProtoOversize)});
      write_all(fd, reply);
      break;
    }
    Bytes body(len);
    if (!read_exact(fd, body.data(), len)) break;
    Bytes out;
    try {
      out = handler_(body);
    } catch (const wire::ProtocolError& e) {
      out = Bytes{static_cast<std::uint8_t>(e.status())};
    } catch (const std::exception&) {
      out = Bytes{static_cast<std::uint8_t>(wire::Status::ProtoMalformed)};
    }
    if (!write_all(fd, wire::frame(out))) break;
  }
  std::lock_guard lock(mu_);
  conns_.remove(fd);
  ::close(fd);
}

TcpEndpoint::~TcpEndpoint() {
  if (fd_ >= 0) ::close(fd_);
}

void TcpEndpoint::connect() {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(addr_.port);
  const std::string host = addr_.host.empty() ? "127.0.0.1" : addr_.host;
  if (::getaddrinfo(host.c_str(), port.c_str(), &hints, &res) != 0 || res == nullptr) {
    throw TransportError("cannot resolve " + addr_.str());
  }
  fd_ = ::socket(res->ai_family, res->ai_socktype | SOCK_CLOEXEC, res->ai_protocol);
  if (fd_ < 0 || ::connect(fd_, res->ai_addr, res->ai_addrlen) != 0) {
    const std::string err = sys_error(("connect " + addr_.str()).c_str());
    ::freeaddrinfo(res);
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
    throw TransportError(err);
  }
  ::freeaddrinfo(res);
  const int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

Bytes TcpEndpoint::call(ByteView body) {
  if (fd_ < 0) connect();
  std::uint8_t hdr[4];
  if (!write_all(fd_, wire::frame(body)) || !read_exact(fd_, hdr, 4)) {
    ::close(fd_);
    fd_ = -1;
    throw TransportError("connection to " + addr_.str() + " lost");
  }
  const std::uint32_t len = be32(hdr);
  if (len > wire::kMaxFrame) throw wire::ProtocolError(wire::Status::ProtoOversize, "oversized response");
  Bytes out(len);
  if (!read_exact(fd_, out.data(), len)) {
    ::close(fd_);
    fd_ = -1;
    throw TransportError("connection to " + addr_.str() + " lost");
  }
  return out;
}

}  // namespace kht::net
