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

#include "kht/client.hpp"

#include "kht/proof.hpp"

namespace kht {

using wire::Status;

const char* to_string(AttackKind k) {
  switch (k) {
    case AttackKind::ChangedEntry: return "ChangedEntry";
    case AttackKind::ForgedEntry: return "ForgedEntry";
    case AttackKind::Relabeled: return "Relabeled";
    case AttackKind::StaleEntry: return "StaleEntry";
    case AttackKind::DeniedEntry: return "DeniedEntry";
    case AttackKind::BadCredential: return "BadCredential";
    case AttackKind::BadProof: return "BadProof";
  }
  return "?";
}

const char* to_string(WriterAbort::Reason r) {
  switch (r) {
    case WriterAbort::Reason::BadCredential: return "BadCredential";
    case WriterAbort::Reason::BadProof: return "BadProof";
    case WriterAbort::Reason::AbsentKey: return "AbsentKey";
    case WriterAbort::Reason::DbRefused: return "DbRefused";
    case WriterAbort::Reason::DbMisbehavior: return "DbMisbehavior";
    case WriterAbort::Reason::PublishRejected: return "PublishRejected";
  }
  return "?";
}

std::string VerifiedReply::str() const {
  switch (kind) {
    case Kind::Present: return "VerifiedPresent";
    case Kind::Absent: return "VerifiedAbsent";
    case Kind::Attack: return std::string("AttackDetected(") + to_string(attack) + ")";
  }
  return "?";
}

StateCredential genesis_credential(const HashConfig& cfg, const EmptyTable& empties) {
  StateCredential c;
  c.alg_id = cfg.alg_id;
  c.seq = 0;
  c.root = empties[cfg.path_height];
  return c;
}

namespace {

/// Current credential, or genesis when nothing was published yet. nullopt
/// when the announced credential does not verify.
std::optional<StateCredential> current_credential(AnnounceClient& ann, const HashConfig& cfg,
                                                  const EmptyTable& empties, const KeyRing& ring) {
  auto cred = ann.fetch();
  if (!cred) return genesis_credential(cfg, empties);
  if (cred->alg_id != cfg.alg_id || verify_credential(*cred, ring) != SigCheck::Ok) return std::nullopt;
  return cred;
}

}  // namespace

WriterSession::WriterSession(const HashConfig& cfg, Writer writer, KeyRing ring, Endpoint& db, Endpoint& announce)
    : cfg_(cfg), empties_(cfg), writer_(std::move(writer)), ring_(std::move(ring)), db_(db, cfg), announce_(announce) {}

StateCredential WriterSession::put(ByteView key, ByteView data) { return mutate(key, Bytes(data.begin(), data.end())); }

StateCredential WriterSession::erase(ByteView key) { return mutate(key, std::nullopt); }

StateCredential WriterSession::mutate(ByteView key, const std::optional<Bytes>& data) {
  for (int i = 1;; ++i) {
    try {
      return attempt(key, data);
    } catch (const WriterAbort& e) {
      // another writer published in between; start over from its credential
      if (e.status() != Status::RejectStale || i >= max_attempts_) throw;
    }
  }
}

StateCredential WriterSession::attempt(ByteView key, const std::optional<Bytes>& data) {
  using R = WriterAbort::Reason;
  // (1) current credential
  const auto cred = current_credential(announce_, cfg_, empties_, ring_);
  if (!cred) throw WriterAbort(R::BadCredential, "announced credential does not verify");

  // (2) pairs along the key's path
  const auto rp = db_.rootpath(key);
  if (rp.status != Status::Ok || !rp.proof) throw WriterAbort(R::DbRefused, wire::to_string(rp.status), rp.status);
  PathProof proof;
  try {
    proof = decode_proof(cfg_, *rp.proof);
  } catch (const ProofError& e) {
    throw WriterAbort(R::BadProof, e.what());
  }

  // (3) the proof must resolve to the credential's root
  const PathBits path = key_path(cfg_, key);
  const Digest current_leaf = proof.pairs[cfg_.path_height - 1][path[cfg_.path_height - 1]];
  const auto check = verify_path(cfg_, cred->root, path, current_leaf, proof);
  if (!check) throw WriterAbort(R::BadProof, "proof does not match credential: " + check.str());
  if (!data && current_leaf == empties_[0]) throw WriterAbort(R::AbsentKey, "no such entry");

  // (4) + (5) entry and the root it will produce
  std::optional<Bytes> value;
  Digest new_leaf = empties_[0];
  if (data) {
    value = sign_entry_value(key, *data, writer_).encode();
    new_leaf = digest(cfg_, *value);
  }
  const Digest expected = updated_root_path(cfg_, path, proof, new_leaf);

  // (6) store
  const auto stored = value ? db_.put(key, *value) : db_.erase(key);
  if (stored.status != Status::Ok || !stored.root) throw WriterAbort(R::DbRefused, wire::to_string(stored.status), stored.status);

  // (7) the database must agree with the locally computed root
  if (!(*stored.root == expected)) {
    throw WriterAbort(R::DbMisbehavior, "database root " + stored.root->hex() + " != expected " + expected.hex());
  }

  // (8) publish
  StateCredential next = sign_credential(cfg_, expected, cred->seq + 1, writer_);
  const Status st = announce_.publish(next);
  if (st != Status::Ok) throw WriterAbort(R::PublishRejected, wire::to_string(st), st);
  return next;
}

ReaderSession::ReaderSession(const HashConfig& cfg, KeyRing ring, Endpoint& db, Endpoint& announce)
    : cfg_(cfg), empties_(cfg), ring_(std::move(ring)), db_(db, cfg), announce_(announce) {}

VerifiedReply ReaderSession::attack(AttackKind k, std::string detail) const {
  VerifiedReply r;
  r.kind = VerifiedReply::Kind::Attack;
  r.attack = k;
  r.detail = std::move(detail);
  return r;
}

VerifiedReply ReaderSession::get(ByteView key) {
  const auto cred = current_credential(announce_, cfg_, empties_, ring_);
  if (!cred) return attack(AttackKind::BadCredential, "announced credential does not verify");
  const Digest& root = cred->root;

  wire::Response resp;
  try {
    resp = db_.get(key);
  } catch (const wire::ProtocolError& e) {
    return attack(AttackKind::BadProof, e.what());
  }
  if (resp.status != Status::Ok && resp.status != Status::Absent) {
    throw wire::ProtocolError(resp.status, std::string("database answered ") + wire::to_string(resp.status));
  }
  PathProof proof;
  try {
    proof = decode_proof(cfg_, resp.proof.value_or(Bytes{}));
  } catch (const ProofError& e) {
    return attack(AttackKind::BadProof, e.what());
  }
  const PathBits path = key_path(cfg_, key);

  if (resp.status == Status::Absent) {
    const auto outcome = verify_path(cfg_, root, path, empties_[0], proof);
    if (!outcome) return attack(AttackKind::DeniedEntry, outcome.str());
    VerifiedReply r;
    r.kind = VerifiedReply::Kind::Absent;
    return r;
  }

  SignedEntryValue sev;
  try {
    sev = SignedEntryValue::decode(resp.value);
  } catch (const DecodeError& e) {
    return attack(AttackKind::ChangedEntry, std::string("entry does not decode: ") + e.what());
  }
  const Digest leaf = digest(cfg_, resp.value);
  switch (verify_entry_value(key, sev, ring_)) {
    case SigCheck::UnknownWriter:
      return attack(AttackKind::ForgedEntry, "entry signed by unknown author " + sev.author_id);
    case SigCheck::BadSignature: {
      // Committed somewhere else in the tree: a genuine entry under the wrong key.
      const auto elsewhere = implied_path(cfg_, proof, leaf);
      if (elsewhere && !(*elsewhere == path) && proof_root(cfg_, proof) == root) {
        return attack(AttackKind::Relabeled, "entry belongs to path " + elsewhere->str());
      }
      // The key's own honest path says nothing is stored there: invented entry.
      const Digest& own_leaf = proof.pairs[cfg_.path_height - 1][path[cfg_.path_height - 1]];
      if (own_leaf == empties_[0] && verify_path(cfg_, root, path, own_leaf, proof)) {
        return attack(AttackKind::ForgedEntry, "entry signature invalid and key absent from credential");
      }
      return attack(AttackKind::ChangedEntry, "entry signature invalid");
    }
    case SigCheck::Ok:
      break;
  }
  const auto outcome = verify_path(cfg_, root, path, leaf, proof);
  if (outcome) {
    VerifiedReply r;
    r.kind = VerifiedReply::Kind::Present;
    r.data = sev.data;
    r.author_id = sev.author_id;
    return r;
  }
  if (outcome.reason == InvalidReason::RootMismatch) {
    return attack(AttackKind::StaleEntry, "consistent proof for an older root");
  }
  return attack(AttackKind::ChangedEntry, outcome.str());
}

MaliciousDb::MaliciousDb(Database& honest, int attack, Bytes target, std::uint64_t seed)
    : db_(honest), attack_(attack), target_(std::move(target)), rng_(seed) {
  if (attack < 1 || attack > 5) throw std::invalid_argument("attack must be 1..5");
}

void MaliciousDb::capture_snapshot() {
  snapshot_tree_ = db_.tree_snapshot();
  snapshot_reply_ = db_.get(target_).first;
}

Bytes MaliciousDb::call(ByteView body) {
  wire::Request req;
  try {
    req = wire::decode_request(body);
  } catch (const wire::ProtocolError&) {
    return db_.handle_body(body);
  }
  if (req.op != wire::Op::Get || req.key != target_) return db_.handle_body(body);
  return wire::encode_response(req.op, forge_get());
}

wire::Response MaliciousDb::forge_get() {
  const HashConfig& cfg = db_.config();
  const EmptyTable& empties = db_.empties();
  auto [reply, proof] = db_.get(target_);
  wire::Response resp;
  resp.status = Status::Ok;

  switch (attack_) {
    case 1: {
      if (!reply.present) throw std::logic_error("attack 1 needs a present target");
      SignedEntryValue sev = SignedEntryValue::decode(reply.value);
      if (sev.data.empty()) {
        sev.data.push_back(static_cast<std::uint8_t>(rng_()));
      } else {
        std::uniform_int_distribution<std::size_t> pos(0, sev.data.size() - 1);
        std::uniform_int_distribution<int> delta(1, 255);
        sev.data[pos(rng_)] ^= static_cast<std::uint8_t>(delta(rng_));
      }
      resp.value = sev.encode();
      break;
    }
    case 2: {
      std::array<std::uint8_t, 32> seed{};
      for (auto& b : seed) b = static_cast<std::uint8_t>(rng_());
      const Writer forger{forged_author_, Keypair::from_seed(seed)};
      Bytes data(1 + rng_() % 32);
      for (auto& b : data) b = static_cast<std::uint8_t>(rng_());
      resp.value = sign_entry_value(target_, data, forger).encode();
      break;
    }
    case 3: {
      auto [src_reply, src_proof] = db_.get(source_);
      if (!src_reply.present) throw std::logic_error("attack 3 needs a present source");
      resp.value = src_reply.value;
      proof = src_proof;
      break;
    }
    case 4: {
      if (!snapshot_tree_ || !snapshot_reply_.present) throw std::logic_error("attack 4 needs a snapshot");
      resp.value = snapshot_reply_.value;
      proof = snapshot_tree_->rootpath(target_);
      break;
    }
    case 5: {
      resp.status = Status::Absent;
      const PathBits path = key_path(cfg, target_);
      const std::size_t h = cfg.path_height;
      proof.pairs[h - 1][path[h - 1]] = empties[0];
      if (rng_() & 1U) {
        // re-chain upwards: consistent all the way, wrong root
        for (std::size_t i = h - 1; i-- > 0;) {
          proof.pairs[i][path[i]] = digest_pair(cfg, proof.pairs[i + 1][0], proof.pairs[i + 1][1]);
        }
      }
      break;
    }
  }
  resp.proof = encode_proof(proof);
  return resp;
}

}  // namespace kht
