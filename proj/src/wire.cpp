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

#include "kht/wire.hpp"

namespace kht::wire {

const char* to_string(Status s) {
  switch (s) {
    case Status::Ok: return "OK";
    case Status::Absent: return "ABSENT";
    case Status::RejectSig: return "REJECT_SIG";
    case Status::RejectStale: return "REJECT_STALE";
    case Status::Empty: return "EMPTY";
    case Status::NotFound: return "NOT_FOUND";
    case Status::PathConflict: return "PATH_CONFLICT";
    case Status::ProtoMalformed: return "PROTO_MALFORMED";
    case Status::ProtoOversize: return "PROTO_OVERSIZE";
    case Status::UnknownOpcode: return "UNKNOWN_OPCODE";
    case Status::IoError: return "IO_ERROR";
  }
  return "?";
}

const char* to_string(Op op) {
  switch (op) {
    case Op::Get: return "GET";
    case Op::Put: return "PUT";
    case Op::Delete: return "DELETE";
    case Op::Rootpath: return "ROOTPATH";
    case Op::Root: return "ROOT";
    case Op::Publish: return "PUBLISH";
    case Op::Fetch: return "FETCH";
  }
  return "?";
}

namespace {

bool known_op(std::uint8_t b) {
  switch (static_cast<Op>(b)) {
    case Op::Get:
    case Op::Put:
    case Op::Delete:
    case Op::Rootpath:
    case Op::Root:
    case Op::Publish:
    case Op::Fetch:
      return true;
  }
  return false;
}

void put_blob(Bytes& out, ByteView b) {
  put_be<std::uint32_t>(out, static_cast<std::uint32_t>(b.size()));
  append(out, b);
}

Bytes get_blob(ByteReader& r, std::size_t limit, const char* what) {
  const auto len = r.get_be<std::uint32_t>();
  if (len > limit) throw ProtocolError(Status::ProtoOversize, std::string(what) + " exceeds limit");
  const auto b = r.take(len);
  return Bytes(b.begin(), b.end());
}

template <typename Fn>
auto guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const DecodeError& e) {
    throw ProtocolError(Status::ProtoMalformed, e.what());
  }
}

}  // namespace

Bytes encode_request(const Request& r) {
  Bytes out;
  out.push_back(static_cast<std::uint8_t>(r.op));
  switch (r.op) {
    case Op::Get:
    case Op::Delete:
    case Op::Rootpath:
      put_blob(out, r.key);
      break;
    case Op::Put:
      put_blob(out, r.key);
      put_blob(out, r.value);
      break;
    case Op::Publish:
      append(out, r.credential);
      break;
    case Op::Root:
    case Op::Fetch:
      break;
  }
  return out;
}

Request decode_request(ByteView body) {
  if (body.size() > kMaxFrame) throw ProtocolError(Status::ProtoOversize, "frame exceeds 16 MiB");
  if (body.empty()) throw ProtocolError(Status::ProtoMalformed, "empty request");
  if (!known_op(body[0])) throw ProtocolError(Status::UnknownOpcode, "unknown opcode");
  return guarded([&] {
    ByteReader r(body.subspan(1));
    Request req;
    req.op = static_cast<Op>(body[0]);
    switch (req.op) {
      case Op::Get:
      case Op::Delete:
      case Op::Rootpath:
        req.key = get_blob(r, kMaxKey, "key");
        break;
      case Op::Put:
        req.key = get_blob(r, kMaxKey, "key");
        req.value = get_blob(r, kMaxValue, "value");
        break;
      case Op::Publish: {
        const auto c = r.take(r.remaining());
        req.credential.assign(c.begin(), c.end());
        break;
      }
      case Op::Root:
      case Op::Fetch:
        break;
    }
    if (!r.done()) throw ProtocolError(Status::ProtoMalformed, "trailing bytes in request");
    return req;
  });
}

Bytes encode_response(Op op, const Response& r) {
  Bytes out;
  out.push_back(static_cast<std::uint8_t>(r.status));
  const bool ok = r.status == Status::Ok;
  switch (op) {
    case Op::Get:
      if (ok) put_blob(out, r.value);
      if ((ok || r.status == Status::Absent) && r.proof) append(out, *r.proof);
      break;
    case Op::Rootpath:
      if (ok && r.proof) append(out, *r.proof);
      break;
    case Op::Put:
    case Op::Delete:
    case Op::Root:
      if (ok && r.root) append(out, r.root->view());
      break;
    case Op::Fetch:
      if (ok) append(out, r.credential);
      break;
    case Op::Publish:
      break;
  }
  return out;
}

Response decode_response(Op op, const HashConfig& cfg, ByteView body) {
  if (body.empty()) throw ProtocolError(Status::ProtoMalformed, "empty response");
  return guarded([&] {
    Response resp;
    resp.status = static_cast<Status>(body[0]);
    ByteReader r(body.subspan(1));
    const bool ok = resp.status == Status::Ok;
    auto take_proof = [&] {
      const auto p = r.take(cfg.proof_bytes());
      resp.proof = Bytes(p.begin(), p.end());
    };
    switch (op) {
      case Op::Get:
        if (ok) resp.value = get_blob(r, kMaxValue, "value");
        if (ok || resp.status == Status::Absent) take_proof();
        break;
      case Op::Rootpath:
        if (ok) take_proof();
        break;
      case Op::Put:
      case Op::Delete:
      case Op::Root:
        if (ok) resp.root = Digest(r.take(cfg.digest_len));
        break;
      case Op::Fetch:
        if (ok) {
          const auto c = r.take(r.remaining());
          resp.credential.assign(c.begin(), c.end());
        }
        break;
      case Op::Publish:
        break;
    }
    if (!r.done()) throw ProtocolError(Status::ProtoMalformed, "trailing bytes in response");
    return resp;
  });
}

Bytes frame(ByteView body) {
  if (body.size() > kMaxFrame) throw ProtocolError(Status::ProtoOversize, "frame exceeds 16 MiB");
  Bytes out;
  out.reserve(4 + body.size());
  put_be<std::uint32_t>(out, static_cast<std::uint32_t>(body.size()));
  append(out, body);
  return out;
}

}  // namespace kht::wire
