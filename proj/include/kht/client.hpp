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
#include <random>
#include <stdexcept>
#include <string>

#include "kht/credentials.hpp"
#include "kht/services.hpp"

namespace kht {

enum class AttackKind { ChangedEntry, ForgedEntry, Relabeled, StaleEntry, DeniedEntry, BadCredential, BadProof };
const char* to_string(AttackKind k);

struct VerifiedReply {
  enum class Kind { Present, Absent, Attack };
  Kind kind = Kind::Absent;
  Bytes data;
  std::string author_id;
  AttackKind attack = AttackKind::BadProof;
  std::string detail;

  bool attack_detected() const { return kind == Kind::Attack; }
  std::string str() const;
};

/// Writer pipeline failure. Nothing was published.
class WriterAbort : public std::runtime_error {
 public:
  enum class Reason { BadCredential, BadProof, AbsentKey, DbRefused, DbMisbehavior, PublishRejected };

  WriterAbort(Reason r, const std::string& what, wire::Status st = wire::Status::Ok)
      : std::runtime_error(what), reason_(r), status_(st) {}
  Reason reason() const { return reason_; }
  /// Status answered by the service that refused, when one did.
  wire::Status status() const { return status_; }

 private:
  Reason reason_;
  wire::Status status_;
};
const char* to_string(WriterAbort::Reason r);

/// Credential every system starts from: seq 0 over the empty tree.
StateCredential genesis_credential(const HashConfig& cfg, const EmptyTable& empties);

/// Writer side of the protocol. Each mutation: fetch and verify the current
/// credential, fetch and verify the key's proof against it, compute the new
/// root locally from the proof, store the entry, check the database reports
/// the same root, then sign and publish seq+1.
class WriterSession {
 public:
  WriterSession(const HashConfig& cfg, Writer writer, KeyRing ring, Endpoint& db, Endpoint& announce);

  StateCredential put(ByteView key, ByteView data);
  StateCredential erase(ByteView key);

  /// Attempts per mutation when the announcement answers REJECT_STALE.
  void set_max_attempts(int n) { max_attempts_ = n; }

 private:
  StateCredential mutate(ByteView key, const std::optional<Bytes>& data);
  StateCredential attempt(ByteView key, const std::optional<Bytes>& data);

  HashConfig cfg_;
  EmptyTable empties_;
  Writer writer_;
  KeyRing ring_;
  DbClient db_;
  AnnounceClient announce_;
  int max_attempts_ = 3;
};

/// Reader side: every answer is checked against the announced credential.
/// Transport and protocol failures throw; lies are reported as Attack.
class ReaderSession {
 public:
  ReaderSession(const HashConfig& cfg, KeyRing ring, Endpoint& db, Endpoint& announce);

  VerifiedReply get(ByteView key);

 private:
  VerifiedReply attack(AttackKind k, std::string detail) const;

  HashConfig cfg_;
  EmptyTable empties_;
  KeyRing ring_;
  DbClient db_;
  AnnounceClient announce_;
};

/// Wraps an honest database and lies about one target key in one of the five
/// ways a dishonest database can. Everything else is forwarded unchanged.
///
///   1 changed:   entry data altered, honest proof
///   2 forged:    entry invented for an absent key, signed with a key the
///                attacker owns
///   3 relabeled: a genuine entry of another key, with that key's genuine proof
///   4 stale:     the target's value and proof from a snapshot taken before it
///                was last updated
///   5 denied:    "no such entry" for a present key, with the best proof the
///                attacker can make without a collision
class MaliciousDb : public Endpoint {
 public:
  MaliciousDb(Database& honest, int attack, Bytes target, std::uint64_t seed);

  /// Attack 3: whose entry to serve under the target key.
  void set_relabel_source(Bytes source) { source_ = std::move(source); }
  /// Attack 4: remember the current state of the target.
  void capture_snapshot();
  /// Attack 2: identity the forged entry claims.
  void set_forged_author(std::string id) { forged_author_ = std::move(id); }

  Bytes call(ByteView body) override;

 private:
  wire::Response forge_get();

  Database& db_;
  int attack_;
  Bytes target_;
  Bytes source_;
  std::string forged_author_ = "mallory";
  std::optional<SparseTree> snapshot_tree_;
  Reply snapshot_reply_;
  std::mt19937_64 rng_;
};

}  // namespace kht
