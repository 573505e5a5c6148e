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

#include "kht/credentials.hpp"

#include <sodium.h>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace kht {

namespace {

constexpr std::array<std::uint8_t, 4> kPublicMagic{'K', 'H', 'P', 'K'};
constexpr std::array<std::uint8_t, 4> kSecretMagic{'K', 'H', 'S', 'K'};

void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw std::runtime_error("libsodium initialisation failed");
}

Bytes read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& p, ByteView magic, ByteView body) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out.write(reinterpret_cast<const char*>(magic.data()), static_cast<std::streamsize>(magic.size()));
  out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
  if (!out) throw std::runtime_error("short write to " + p.string());
}

ByteView strip_magic(const Bytes& file, const std::array<std::uint8_t, 4>& magic, std::size_t body,
                     const std::filesystem::path& p) {
  if (file.size() != magic.size() + body || !std::equal(magic.begin(), magic.end(), file.begin())) {
    throw std::runtime_error("not a key file: " + p.string());
  }
  return ByteView(file).subspan(magic.size());
}

}  // namespace

Keypair Keypair::generate() {
  ensure_sodium();
  Keypair kp;
  crypto_sign_keypair(kp.pk_.data(), kp.sk_.data());
  return kp;
}

Keypair Keypair::from_seed(ByteView seed32) {
  ensure_sodium();
  if (seed32.size() != crypto_sign_SEEDBYTES) throw std::invalid_argument("seed must be 32 bytes");
  Keypair kp;
  crypto_sign_seed_keypair(kp.pk_.data(), kp.sk_.data(), seed32.data());
  return kp;
}

Bytes Keypair::sign(ByteView message) const {
  Bytes sig(kSignatureBytes);
  crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), sk_.data());
  return sig;
}

void Keypair::save(const std::filesystem::path& secret_file, const std::filesystem::path& public_file) const {
  write_file(secret_file, kSecretMagic, sk_);
  std::filesystem::permissions(secret_file, std::filesystem::perms::owner_read | std::filesystem::perms::owner_write);
  write_file(public_file, kPublicMagic, pk_);
}

Keypair Keypair::load(const std::filesystem::path& secret_file) {
  const Bytes file = read_file(secret_file);
  const ByteView body = strip_magic(file, kSecretMagic, kSecretKeyBytes, secret_file);
  Keypair kp;
  std::copy(body.begin(), body.end(), kp.sk_.begin());
  // the public half is the tail of an Ed25519 secret key
  crypto_sign_ed25519_sk_to_pk(kp.pk_.data(), kp.sk_.data());
  return kp;
}

PublicKey load_public_key(const std::filesystem::path& public_file) {
  const Bytes file = read_file(public_file);
  const ByteView body = strip_magic(file, kPublicMagic, kPublicKeyBytes, public_file);
  PublicKey pk{};
  std::copy(body.begin(), body.end(), pk.begin());
  return pk;
}

bool verify_signature(const PublicKey& pk, ByteView message, ByteView signature) {
  ensure_sodium();
  if (signature.size() != kSignatureBytes) return false;
  return crypto_sign_verify_detached(signature.data(), message.data(), message.size(), pk.data()) == 0;
}

const PublicKey* KeyRing::find(const std::string& writer_id) const {
  auto it = keys_.find(writer_id);
  return it == keys_.end() ? nullptr : &it->second;
}

KeyRing KeyRing::load_dir(const std::filesystem::path& dir) {
  KeyRing ring;
  for (const auto& f : std::filesystem::directory_iterator(dir)) {
    if (f.path().extension() == ".pub") ring.add(f.path().stem().string(), load_public_key(f.path()));
  }
  return ring;
}

const char* to_string(SigCheck c) {
  switch (c) {
    case SigCheck::Ok: return "Ok";
    case SigCheck::UnknownWriter: return "UnknownWriter";
    case SigCheck::BadSignature: return "BadSignature";
  }
  return "?";
}

Bytes StateCredential::signed_bytes() const {
  if (writer_id.size() > 255) throw std::invalid_argument("writer id longer than 255 bytes");
  Bytes out;
  out.push_back(alg_id);
  put_be<std::uint64_t>(out, seq);
  append(out, root.view());
  out.push_back(static_cast<std::uint8_t>(writer_id.size()));
  append(out, to_bytes(writer_id));
  return out;
}

Bytes StateCredential::encode() const {
  if (signature.size() > 0xFFFF) throw std::invalid_argument("signature too long");
  Bytes out = signed_bytes();
  put_be<std::uint16_t>(out, static_cast<std::uint16_t>(signature.size()));
  append(out, signature);
  return out;
}

StateCredential StateCredential::decode(ByteView bytes) {
  ByteReader r(bytes);
  StateCredential c;
  c.alg_id = r.get_be<std::uint8_t>();
  const HashConfig cfg = HashConfig::from_alg_id(c.alg_id);
  c.seq = r.get_be<std::uint64_t>();
  c.root = Digest(r.take(cfg.digest_len));
  c.writer_id = to_string(r.take(r.get_be<std::uint8_t>()));
  const auto sig = r.take(r.get_be<std::uint16_t>());
  c.signature.assign(sig.begin(), sig.end());
  if (!r.done()) throw DecodeError("trailing bytes after credential");
  return c;
}

StateCredential sign_credential(const HashConfig& cfg, const Digest& root, std::uint64_t seq, const Writer& writer) {
  StateCredential c;
  c.alg_id = cfg.alg_id;
  c.seq = seq;
  c.root = root;
  c.writer_id = writer.id;
  c.signature = writer.keys.sign(c.signed_bytes());
  return c;
}

SigCheck verify_credential(const StateCredential& cred, const KeyRing& ring) {
  const PublicKey* pk = ring.find(cred.writer_id);
  if (pk == nullptr) return SigCheck::UnknownWriter;
  if (cred.writer_id.size() > 255) return SigCheck::BadSignature;
  return verify_signature(*pk, cred.signed_bytes(), cred.signature) ? SigCheck::Ok : SigCheck::BadSignature;
}

Bytes SignedEntryValue::encode() const {
  if (author_id.size() > 255 || signature.size() > 0xFFFF || data.size() > 0xFFFFFFFFULL) {
    throw std::invalid_argument("entry field too long");
  }
  Bytes out;
  put_be<std::uint32_t>(out, static_cast<std::uint32_t>(data.size()));
  append(out, data);
  out.push_back(static_cast<std::uint8_t>(author_id.size()));
  append(out, to_bytes(author_id));
  put_be<std::uint16_t>(out, static_cast<std::uint16_t>(signature.size()));
  append(out, signature);
  return out;
}

SignedEntryValue SignedEntryValue::decode(ByteView bytes) {
  ByteReader r(bytes);
  SignedEntryValue v;
  const auto data = r.take(r.get_be<std::uint32_t>());
  v.data.assign(data.begin(), data.end());
  v.author_id = to_string(r.take(r.get_be<std::uint8_t>()));
  const auto sig = r.take(r.get_be<std::uint16_t>());
  v.signature.assign(sig.begin(), sig.end());
  if (!r.done()) throw DecodeError("trailing bytes after entry value");
  return v;
}

Bytes entry_signed_bytes(ByteView key, ByteView data) {
  Bytes out;
  put_be<std::uint32_t>(out, static_cast<std::uint32_t>(key.size()));
  append(out, key);
  append(out, data);
  return out;
}

SignedEntryValue sign_entry_value(ByteView key, ByteView data, const Writer& author) {
  SignedEntryValue v;
  v.data.assign(data.begin(), data.end());
  v.author_id = author.id;
  v.signature = author.keys.sign(entry_signed_bytes(key, data));
  return v;
}

SigCheck verify_entry_value(ByteView key, const SignedEntryValue& sev, const KeyRing& ring) {
  const PublicKey* pk = ring.find(sev.author_id);
  if (pk == nullptr) return SigCheck::UnknownWriter;
  return verify_signature(*pk, entry_signed_bytes(key, sev.data), sev.signature) ? SigCheck::Ok
                                                                                 : SigCheck::BadSignature;
}

Bytes length_prefixed(ByteView key) {
  Bytes out;
  put_be<std::uint64_t>(out, key.size());
  append(out, key);
  return out;
}

Digest simple_hash_credential(std::vector<Bytes> keys, const HashConfig& cfg) {
  std::sort(keys.begin(), keys.end());
  Bytes all;
  for (const auto& k : keys) append(all, length_prefixed(k));
  return digest(cfg, all);
}

Digest chain_credential_extend(const Digest& prev, ByteView key, const HashConfig& cfg) {
  Bytes buf = prev.bytes();
  append(buf, length_prefixed(key));
  return digest(cfg, buf);
}

ForestCredential forest_append(ForestCredential f, ByteView key, const HashConfig& cfg) {
  f.trees.push_back({0, digest(cfg, length_prefixed(key))});
  while (f.trees.size() >= 2 && f.trees[f.trees.size() - 1].height == f.trees[f.trees.size() - 2].height) {
    const auto newer = f.trees.back();
    f.trees.pop_back();
    auto& older = f.trees.back();
    older.root = digest_pair(cfg, older.root, newer.root);
    ++older.height;
  }
  return f;
}

}  // namespace kht
