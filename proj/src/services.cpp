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

#include "kht/services.hpp"

namespace kht {

using wire::Op;
using wire::ProtocolError;
using wire::Status;

Database::Database(const HashConfig& cfg, const Options& opts) : cfg_(cfg), tree_(cfg) {
  if (opts.wal) {
    wal_ = std::make_unique<WriteAheadLog>(*opts.wal, opts.sync, [this](const WalRecord& rec) { apply(rec); });
  }
}

void Database::apply(const WalRecord& rec) {
  if (rec.op == WalRecord::Kind::Put) {
    tree_.insert(rec.key, digest(cfg_, rec.value));
    table_[rec.key] = rec.value;
  } else {
    tree_.erase(rec.key);
    table_.erase(rec.key);
  }
  seq_ = rec.seq;
}

std::pair<Reply, PathProof> Database::get(ByteView key) const {
  std::shared_lock lock(mu_);
  const Bytes k(key.begin(), key.end());
  auto it = table_.find(k);
  Reply reply = it == table_.end() ? Reply::Absent() : Reply::Present(it->second);
  return {std::move(reply), tree_.rootpath(key)};
}

PathProof Database::rootpath(ByteView key) const {
  std::shared_lock lock(mu_);
  return tree_.rootpath(key);
}

Digest Database::root() const {
  std::shared_lock lock(mu_);
  return tree_.root_digest();
}

std::size_t Database::size() const {
  std::shared_lock lock(mu_);
  return table_.size();
}

SparseTree Database::tree_snapshot() const {
  std::shared_lock lock(mu_);
  return tree_;
}

Digest Database::put(ByteView key, ByteView value) {
  if (key.size() > wire::kMaxKey || value.size() > wire::kMaxValue) {
    throw ProtocolError(Status::ProtoOversize, "key or value exceeds limit");
  }
  try {
    (void)SignedEntryValue::decode(value);
  } catch (const DecodeError& e) {
    throw ProtocolError(Status::ProtoMalformed, std::string("value is not a signed entry: ") + e.what());
  }
  std::unique_lock lock(mu_);
  const Bytes k(key.begin(), key.end());
  if (!table_.contains(k) && tree_.lookup_digest(key)) {
    throw ProtocolError(Status::PathConflict, "another key occupies this leaf path");
  }
  WalRecord rec{WalRecord::Kind::Put, seq_ + 1, k, Bytes(value.begin(), value.end())};
  if (wal_) wal_->append(rec);
  apply(rec);
  return tree_.root_digest();
}

Digest Database::erase(ByteView key) {
  std::unique_lock lock(mu_);
  const Bytes k(key.begin(), key.end());
  if (!table_.contains(k)) throw ProtocolError(Status::NotFound, "no such entry");
  WalRecord rec{WalRecord::Kind::Delete, seq_ + 1, k, {}};
  if (wal_) wal_->append(rec);
  apply(rec);
  return tree_.root_digest();
}

wire::Response Database::handle(const wire::Request& req) {
  wire::Response resp;
  try {
    switch (req.op) {
      case Op::Get: {
        auto [reply, proof] = get(req.key);
        resp.status = reply.present ? Status::Ok : Status::Absent;
        resp.value = std::move(reply.value);
        resp.proof = encode_proof(proof);
        break;
      }
      case Op::Rootpath:
        resp.proof = encode_proof(rootpath(req.key));
        break;
      case Op::Root:
        resp.root = root();
        break;
      case Op::Put:
        resp.root = put(req.key, req.value);
        break;
      case Op::Delete:
        resp.root = erase(req.key);
        break;
      case Op::Publish:
      case Op::Fetch:
        return wire::status_only(Status::UnknownOpcode);
    }
  } catch (const ProtocolError& e) {
    return wire::status_only(e.status());
  } catch (const StorageError&) {
    return wire::status_only(Status::IoError);
  }
  return resp;
}

Bytes Database::handle_body(ByteView body) {
  wire::Request req;
  try {
    req = wire::decode_request(body);
  } catch (const ProtocolError& e) {
    return Bytes{static_cast<std::uint8_t>(e.status())};
  }
  return wire::encode_response(req.op, handle(req));
}

void Database::audit() const {
  std::shared_lock lock(mu_);
  tree_.check_invariants();
  if (tree_.size() != table_.size()) throw std::logic_error("table and tree disagree on entry count");
  for (const auto& [key, value] : table_) {
    const auto leaf = tree_.lookup_digest(key);
    if (!leaf || !(*leaf == digest(cfg_, value))) throw std::logic_error("tree leaf does not match table entry");
  }
}

Status Announcement::publish(const StateCredential& cred) {
  if (verify_credential(cred, ring_) != SigCheck::Ok) return Status::RejectSig;
  std::unique_lock lock(mu_);
  const std::uint64_t floor = latest_ ? latest_->seq : 0;
  if (cred.seq <= floor) return Status::RejectStale;
  latest_ = cred;
  return Status::Ok;
}

std::optional<StateCredential> Announcement::fetch() const {
  std::shared_lock lock(mu_);
  return latest_;
}

wire::Response Announcement::handle(const wire::Request& req) {
  switch (req.op) {
    case Op::Publish: {
      StateCredential cred;
      try {
        cred = StateCredential::decode(req.credential);
      } catch (const DecodeError&) {
        return wire::status_only(Status::ProtoMalformed);
      }
      return wire::status_only(publish(cred));
    }
    case Op::Fetch: {
      auto latest = fetch();
      if (!latest) return wire::status_only(Status::Empty);
      wire::Response resp;
      resp.credential = latest->encode();
      return resp;
    }
    default:
      return wire::status_only(Status::UnknownOpcode);
  }
}

Bytes Announcement::handle_body(ByteView body) {
  wire::Request req;
  try {
    req = wire::decode_request(body);
  } catch (const ProtocolError& e) {
    return Bytes{static_cast<std::uint8_t>(e.status())};
  }
  return wire::encode_response(req.op, handle(req));
}

wire::Response DbClient::call(const wire::Request& req) {
  const Bytes body = ep_.call(wire::encode_request(req));
  return wire::decode_response(req.op, cfg_, body);
}

wire::Response DbClient::get(ByteView key) { return call({Op::Get, Bytes(key.begin(), key.end()), {}, {}}); }

wire::Response DbClient::rootpath(ByteView key) {
  return call({Op::Rootpath, Bytes(key.begin(), key.end()), {}, {}});
}

wire::Response DbClient::put(ByteView key, ByteView value) {
  return call({Op::Put, Bytes(key.begin(), key.end()), Bytes(value.begin(), value.end()), {}});
}

wire::Response DbClient::erase(ByteView key) { return call({Op::Delete, Bytes(key.begin(), key.end()), {}, {}}); }

wire::Response DbClient::root() { return call({Op::Root, {}, {}, {}}); }

Status AnnounceClient::publish(const StateCredential& cred) {
  const Bytes body = ep_.call(wire::encode_request({Op::Publish, {}, {}, cred.encode()}));
  // publish answers carry no digest; any profile decodes them
  return wire::decode_response(Op::Publish, HashConfig::default_profile(), body).status;
}

std::optional<StateCredential> AnnounceClient::fetch() {
  const Bytes body = ep_.call(wire::encode_request({Op::Fetch, {}, {}, {}}));
  const auto resp = wire::decode_response(Op::Fetch, HashConfig::default_profile(), body);
  if (resp.status == Status::Empty) return std::nullopt;
  if (resp.status != Status::Ok) throw ProtocolError(resp.status, "fetch failed");
  try {
    return StateCredential::decode(resp.credential);
  } catch (const DecodeError& e) {
    throw ProtocolError(Status::ProtoMalformed, e.what());
  }
}

}  // namespace kht
