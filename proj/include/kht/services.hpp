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

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <utility>

#include "kht/credentials.hpp"
#include "kht/proof.hpp"
#include "kht/sparse_tree.hpp"
#include "kht/wal.hpp"
#include "kht/wire.hpp"

namespace kht {

/// Something that answers request bodies with response bodies: an in-process
/// service, a TCP connection, or a wrapper that tampers with either.
class Endpoint {
 public:
  virtual ~Endpoint() = default;
  virtual Bytes call(ByteView request_body) = 0;
};

/// Transport-level failure (connection refused, short read, ...).
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Key-value table plus the sparse tree over it.
///
/// Each leaf holds digest(stored value bytes); the stored value is a
/// SignedEntryValue encoding. Mutations are serialised under one writer lock
/// that covers WAL append, tree update and table update; readers share the
/// lock, so no reader observes a half-applied mutation.
class Database {
 public:
  struct Options {
    std::optional<std::filesystem::path> wal;
    bool sync = true;
  };

  explicit Database(const HashConfig& cfg) : Database(cfg, Options{}) {}
  Database(const HashConfig& cfg, const Options& opts);

  const HashConfig& config() const { return cfg_; }
  const EmptyTable& empties() const { return tree_.empties(); }

  std::pair<Reply, PathProof> get(ByteView key) const;
  PathProof rootpath(ByteView key) const;
  Digest root() const;
  std::size_t size() const;
  /// Snapshot of the tree (for harnesses and audits).
  SparseTree tree_snapshot() const;

  /// Throw wire::ProtocolError (malformed value, PathConflict, NotFound) or
  /// StorageError; state is unchanged on any throw.
  Digest put(ByteView key, ByteView value);
  Digest erase(ByteView key);

  wire::Response handle(const wire::Request& req);
  /// Decode, dispatch, encode; protocol errors become status-only answers.
  Bytes handle_body(ByteView body);

  /// Table <-> tree coherence and full tree audit; throws std::logic_error.
  void audit() const;

  WriteAheadLog* wal() { return wal_.get(); }

 private:
  void apply(const WalRecord& rec);

  HashConfig cfg_;
  mutable std::shared_mutex mu_;
  SparseTree tree_;
  std::map<Bytes, Bytes> table_;
  std::uint64_t seq_ = 0;
  std::unique_ptr<WriteAheadLog> wal_;
};

/// Single-slot store for the latest state credential. Only credentials signed
/// by a known writer with a strictly larger seq replace the slot.
class Announcement {
 public:
  explicit Announcement(KeyRing ring) : ring_(std::move(ring)) {}

  wire::Status publish(const StateCredential& cred);
  std::optional<StateCredential> fetch() const;

  wire::Response handle(const wire::Request& req);
  Bytes handle_body(ByteView body);

 private:
  KeyRing ring_;
  mutable std::shared_mutex mu_;
  std::optional<StateCredential> latest_;
};

/// Endpoint calling a service object directly.
template <typename Service>
class LocalEndpoint : public Endpoint {
 public:
  explicit LocalEndpoint(Service& s) : service_(s) {}
  Bytes call(ByteView body) override { return service_.handle_body(body); }

 private:
  Service& service_;
};

/// Typed stub over an Endpoint speaking the database protocol.
class DbClient {
 public:
  DbClient(Endpoint& ep, const HashConfig& cfg) : ep_(ep), cfg_(cfg) {}

  wire::Response call(const wire::Request& req);
  /// GET; the proof is returned undecoded so callers can classify bad lengths.
  wire::Response get(ByteView key);
  wire::Response rootpath(ByteView key);
  wire::Response put(ByteView key, ByteView value);
  wire::Response erase(ByteView key);
  wire::Response root();

 private:
  Endpoint& ep_;
  HashConfig cfg_;
};

class AnnounceClient {
 public:
  explicit AnnounceClient(Endpoint& ep) : ep_(ep) {}

  wire::Status publish(const StateCredential& cred);
  /// nullopt when the slot is empty. Throws wire::ProtocolError on garbage.
  std::optional<StateCredential> fetch();

 private:
  Endpoint& ep_;
};

}  // namespace kht
