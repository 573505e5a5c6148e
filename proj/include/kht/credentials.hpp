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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "kht/hash.hpp"

namespace kht {

// Ed25519 (libsodium) behind a small sign/verify surface.
inline constexpr std::size_t kPublicKeyBytes = 32;
inline constexpr std::size_t kSecretKeyBytes = 64;
inline constexpr std::size_t kSignatureBytes = 64;

using PublicKey = std::array<std::uint8_t, kPublicKeyBytes>;

class Keypair {
 public:
  static Keypair generate();
  /// Deterministic keypair from a 32-byte seed (tests, demos).
  static Keypair from_seed(ByteView seed32);

  const PublicKey& public_key() const { return pk_; }
  Bytes sign(ByteView message) const;

  void save(const std::filesystem::path& secret_file, const std::filesystem::path& public_file) const;
  static Keypair load(const std::filesystem::path& secret_file);

 private:
  PublicKey pk_{};
  std::array<std::uint8_t, kSecretKeyBytes> sk_{};
};

bool verify_signature(const PublicKey& pk, ByteView message, ByteView signature);

PublicKey load_public_key(const std::filesystem::path& public_file);

/// A writer: identity plus signing key.
struct Writer {
  std::string id;
  Keypair keys;
};

/// Public keys of the writers, held by readers out of band.
class KeyRing {
 public:
  void add(const std::string& writer_id, const PublicKey& pk) { keys_[writer_id] = pk; }
  const PublicKey* find(const std::string& writer_id) const;
  std::size_t size() const { return keys_.size(); }
  /// Loads every `<id>.pub` file in a directory.
  static KeyRing load_dir(const std::filesystem::path& dir);

 private:
  std::map<std::string, PublicKey> keys_;
};

enum class SigCheck { Ok, UnknownWriter, BadSignature };
const char* to_string(SigCheck c);

/// Signed summary of database state, published via the announcement service.
struct StateCredential {
  std::uint8_t alg_id = 0x01;
  std::uint64_t seq = 0;
  Digest root;
  std::string writer_id;
  Bytes signature;

  /// alg_id(1) || seq(8) || root(L) || writer_id_len(1) || writer_id
  Bytes signed_bytes() const;
  /// signed_bytes() || sig_len(2) || signature
  Bytes encode() const;
  /// Throws DecodeError on malformed input or trailing bytes.
  static StateCredential decode(ByteView bytes);

  friend bool operator==(const StateCredential&, const StateCredential&) = default;
};

StateCredential sign_credential(const HashConfig& cfg, const Digest& root, std::uint64_t seq, const Writer& writer);
SigCheck verify_credential(const StateCredential& cred, const KeyRing& ring);

/// Entry value carrying the author's signature over the key it is stored under.
struct SignedEntryValue {
  Bytes data;
  std::string author_id;
  Bytes signature;

  /// data_len(4) || data || author_len(1) || author || sig_len(2) || signature
  Bytes encode() const;
  static SignedEntryValue decode(ByteView bytes);

  friend bool operator==(const SignedEntryValue&, const SignedEntryValue&) = default;
};

/// Bytes covered by an entry signature: key_len(4) || key || data.
Bytes entry_signed_bytes(ByteView key, ByteView data);
SignedEntryValue sign_entry_value(ByteView key, ByteView data, const Writer& author);
SigCheck verify_entry_value(ByteView key, const SignedEntryValue& sev, const KeyRing& ring);

// Baseline credential schemes. Keys are framed with an 8-byte big-endian
// length prefix.

Bytes length_prefixed(ByteView key);

/// h over all keys, sorted bytewise, each length-prefixed.
Digest simple_hash_credential(std::vector<Bytes> keys, const HashConfig& cfg);

/// c0 = h(""), c_i = h(c_{i-1} || lp(k_i)).
inline Digest chain_genesis(const HashConfig& cfg) { return digest(cfg, ByteView{}); }
Digest chain_credential_extend(const Digest& prev, ByteView key, const HashConfig& cfg);

/// Roots of perfect hash trees whose sizes follow the binary representation
/// of the entry count, largest first.
struct ForestCredential {
  struct Tree {
    std::size_t height = 0;
    Digest root;
    friend bool operator==(const Tree&, const Tree&) = default;
  };
  std::vector<Tree> trees;
  friend bool operator==(const ForestCredential&, const ForestCredential&) = default;
};

ForestCredential forest_append(ForestCredential f, ByteView key, const HashConfig& cfg);

}  // namespace kht
