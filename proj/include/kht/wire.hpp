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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "kht/bytes.hpp"
#include "kht/hash.hpp"

namespace kht::wire {

inline constexpr std::size_t kMaxFrame = 16U << 20;
inline constexpr std::size_t kMaxKey = 64U << 10;
inline constexpr std::size_t kMaxValue = 1U << 20;

enum class Op : std::uint8_t {
  Get = 0x01,
  Put = 0x02,
  Delete = 0x03,
  Rootpath = 0x04,
  Root = 0x05,
  Publish = 0x10,
  Fetch = 0x11,
};

enum class Status : std::uint8_t {
  Ok = 0x00,  // also PRESENT for GET
  Absent = 0x01,
  RejectSig = 0x10,
  RejectStale = 0x11,
  Empty = 0x12,
  NotFound = 0x20,
  PathConflict = 0x21,
  ProtoMalformed = 0x30,
  ProtoOversize = 0x31,
  UnknownOpcode = 0x32,
  IoError = 0x40,
};

const char* to_string(Status s);
const char* to_string(Op op);

/// A malformed or over-limit message; carries the status to answer with.
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(Status s, const std::string& what) : std::runtime_error(what), status_(s) {}
  Status status() const { return status_; }

 private:
  Status status_;
};

struct Request {
  Op op = Op::Root;
  Bytes key;         // Get, Put, Delete, Rootpath
  Bytes value;       // Put
  Bytes credential;  // Publish: canonical credential encoding

  friend bool operator==(const Request&, const Request&) = default;
};

struct Response {
  Status status = Status::Ok;
  Bytes value;                // Get when present
  std::optional<Bytes> proof; // Get, Rootpath (2*H*L bytes)
  std::optional<Digest> root; // Put, Delete, Root
  Bytes credential;           // Fetch

  friend bool operator==(const Response&, const Response&) = default;
};

Bytes encode_request(const Request& r);
/// Throws ProtocolError (ProtoMalformed, ProtoOversize, UnknownOpcode).
Request decode_request(ByteView body);

Bytes encode_response(Op op, const Response& r);
/// Needs the request opcode and profile to know the body layout.
Response decode_response(Op op, const HashConfig& cfg, ByteView body);

/// Response carrying only a status byte.
inline Response status_only(Status s) {
  Response r;
  r.status = s;
  return r;
}

/// len(4) || body.
Bytes frame(ByteView body);

}  // namespace kht::wire
