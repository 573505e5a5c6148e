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

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <random>

#include "doctest.h"
#include "kht/net.hpp"
#include "kht/wire.hpp"

using namespace kht;
using namespace kht::wire;

namespace {

const HashConfig kToy = HashConfig::toy_profile();

Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
  Bytes b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng());
  return b;
}

/// Sends raw bytes on a fresh connection and reads one framed reply body.
Bytes raw_exchange(std::uint16_t port, const Bytes& bytes) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  REQUIRE(fd >= 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  REQUIRE(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
  REQUIRE(::send(fd, bytes.data(), bytes.size(), MSG_NOSIGNAL) == static_cast<ssize_t>(bytes.size()));
  auto read_n = [&](std::size_t n) {
    Bytes out(n);
    std::size_t got = 0;
    while (got < n) {
      const ssize_t r = ::recv(fd, out.data() + got, n - got, 0);
      if (r <= 0) break;
      got += static_cast<std::size_t>(r);
    }
    out.resize(got);
    return out;
  };
  const Bytes hdr = read_n(4);
  Bytes body;
  if (hdr.size() == 4) {
    const std::uint32_t len = (std::uint32_t{hdr[0]} << 24) | (std::uint32_t{hdr[1]} << 16) |
                              (std::uint32_t{hdr[2]} << 8) | hdr[3];
    body = read_n(len);
  }
  ::close(fd);
  return body;
}

}  // namespace

TEST_CASE("GET frame layout") {
  Request r;
  r.op = Op::Get;
  r.key = to_bytes("k");
  CHECK(to_hex(frame(encode_request(r))) == "00000006010000000" "16b");
}

TEST_CASE("request layouts") {
  Request put;
  put.op = Op::Put;
  put.key = to_bytes("k");
  put.value = to_bytes("vv");
  CHECK(to_hex(encode_request(put)) == "02" "00000001" "6b" "00000002" "7676");
  Request root;
  root.op = Op::Root;
  CHECK(to_hex(encode_request(root)) == "05");
  Request pub;
  pub.op = Op::Publish;
  pub.credential = from_hex("aabb");
  CHECK(to_hex(encode_request(pub)) == "10aabb");
}

TEST_CASE("requests round trip") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    Request r;
    switch (i % 7) {
      case 0: r.op = Op::Get; r.key = random_bytes(rng, rng() % 100); break;
      case 1: r.op = Op::Put; r.key = random_bytes(rng, rng() % 100); r.value = random_bytes(rng, rng() % 1000); break;
      case 2: r.op = Op::Delete; r.key = random_bytes(rng, rng() % 100); break;
      case 3: r.op = Op::Rootpath; r.key = random_bytes(rng, rng() % 100); break;
      case 4: r.op = Op::Root; break;
      case 5: r.op = Op::Publish; r.credential = random_bytes(rng, 1 + rng() % 200); break;
      default: r.op = Op::Fetch; break;
    }
    REQUIRE(decode_request(encode_request(r)) == r);
  }
}

TEST_CASE("responses round trip") {
  std::mt19937_64 rng(2);
  const Bytes proof = random_bytes(rng, kToy.proof_bytes());
  const Digest root = digest(kToy, "root");
  std::vector<std::pair<Op, Response>> cases;
  Response present;
  present.value = to_bytes("value");
  present.proof = proof;
  cases.emplace_back(Op::Get, present);
  Response absent = status_only(Status::Absent);
  absent.proof = proof;
  cases.emplace_back(Op::Get, absent);
  Response rp;
  rp.proof = proof;
  cases.emplace_back(Op::Rootpath, rp);
  for (Op op : {Op::Put, Op::Delete, Op::Root}) {
    Response r;
    r.root = root;
    cases.emplace_back(op, r);
  }
  Response fetched;
  fetched.credential = random_bytes(rng, 120);
  cases.emplace_back(Op::Fetch, fetched);
  cases.emplace_back(Op::Fetch, status_only(Status::Empty));
  cases.emplace_back(Op::Publish, status_only(Status::Ok));
  cases.emplace_back(Op::Publish, status_only(Status::RejectStale));
  cases.emplace_back(Op::Publish, status_only(Status::RejectSig));
  cases.emplace_back(Op::Delete, status_only(Status::NotFound));
  cases.emplace_back(Op::Put, status_only(Status::PathConflict));
  for (const auto& [op, resp] : cases) {
    CHECK(decode_response(op, kToy, encode_response(op, resp)) == resp);
  }
  // GET present: status 00, value length, value, proof
  const Bytes enc = encode_response(Op::Get, present);
  CHECK(to_hex(ByteView(enc.data(), 10)) == "00" "00000005" "76616c75" "65");
  CHECK(enc.size() == 1 + 4 + 5 + kToy.proof_bytes());
}

TEST_CASE("malformed requests are classified") {
  auto status_of = [](const Bytes& body) {
    try {
      decode_request(body);
    } catch (const ProtocolError& e) {
      return e.status();
    }
    return Status::Ok;
  };
  CHECK(status_of({}) == Status::ProtoMalformed);
  CHECK(status_of(from_hex("99")) == Status::UnknownOpcode);
  CHECK(status_of(from_hex("01000000")) == Status::ProtoMalformed);             // truncated length
  CHECK(status_of(from_hex("01000000056b")) == Status::ProtoMalformed);         // truncated key
  CHECK(status_of(from_hex("01000000016b00")) == Status::ProtoMalformed);       // trailing byte
  CHECK(status_of(from_hex("0500")) == Status::ProtoMalformed);
  CHECK(status_of(from_hex("0100010001")) == Status::ProtoOversize);            // key > 64 KiB
  CHECK(status_of(from_hex("1000")) == Status::Ok);
  Bytes huge(kMaxFrame + 1, 0);
  huge[0] = 0x01;
  CHECK(status_of(huge) == Status::ProtoOversize);
}

TEST_CASE("malformed responses are rejected") {
  CHECK_THROWS_AS(decode_response(Op::Get, kToy, {}), ProtocolError);
  CHECK_THROWS_AS(decode_response(Op::Get, kToy, from_hex("01aa")), ProtocolError);
  CHECK_THROWS_AS(decode_response(Op::Root, kToy, from_hex("00aa")), ProtocolError);
  CHECK_THROWS_AS(frame(Bytes(kMaxFrame + 1, 0)), ProtocolError);
}

TEST_CASE("server answers framed requests and refuses bad frames") {
  net::FrameServer server(net::Address::parse("127.0.0.1:0"), [](ByteView body) {
    const Request r = decode_request(body);
    Response resp;
    resp.root = digest(kToy, r.key);
    return encode_response(Op::Root, resp);
  });
  REQUIRE(server.port() != 0);

  Request get;
  get.op = Op::Get;
  get.key = to_bytes("k");
  net::TcpEndpoint ep(net::Address::parse("127.0.0.1:" + std::to_string(server.port())));
  for (int i = 0; i < 3; ++i) {
    const Response r = decode_response(Op::Root, kToy, ep.call(encode_request(get)));
    CHECK(r.root == digest(kToy, "k"));
  }

  // length header over 16 MiB
  const Bytes oversize = from_hex("01000001");
  CHECK(raw_exchange(server.port(), oversize) == Bytes{static_cast<std::uint8_t>(Status::ProtoOversize)});
  // handler throws ProtocolError for an unknown opcode
  CHECK(raw_exchange(server.port(), from_hex("0000000199")) == Bytes{static_cast<std::uint8_t>(Status::UnknownOpcode)});
  server.stop();
}

TEST_CASE("addresses") {
  const auto a = net::Address::parse("127.0.0.1:7400");
  CHECK(a.host == "127.0.0.1");
  CHECK(a.port == 7400);
  CHECK(net::Address::parse(":9").host.empty());
  CHECK_THROWS(net::Address::parse("nope"));
  CHECK_THROWS(net::Address::parse("h:99999"));
}

TEST_CASE("connecting to a closed port is a transport error") {
  net::TcpEndpoint ep(net::Address::parse("127.0.0.1:1"));
  CHECK_THROWS_AS(ep.call(from_hex("05")), TransportError);
}
