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

#include "kht/proof.hpp"

namespace kht {

std::string VerifyOutcome::str() const {
  if (valid) return "Valid";
  switch (reason) {
    case InvalidReason::LeafMismatch: return "Invalid(LeafMismatch)";
    case InvalidReason::ChainBreak: return "Invalid(ChainBreak(" + std::to_string(level) + "))";
    case InvalidReason::RootMismatch: return "Invalid(RootMismatch)";
    case InvalidReason::BadLength: return "Invalid(BadLength)";
  }
  return "Invalid";
}

namespace {

bool well_formed(const HashConfig& cfg, const PathProof& proof) {
  if (proof.size() != cfg.path_height) return false;
  for (const auto& p : proof.pairs) {
    if (p[0].size() != cfg.digest_len || p[1].size() != cfg.digest_len) return false;
  }
  return true;
}

}  // namespace

Digest proof_root(const HashConfig& cfg, const PathProof& proof) {
  if (proof.pairs.empty()) throw ProofError("empty proof");
  return digest_pair(cfg, proof.pairs[0][0], proof.pairs[0][1]);
}

VerifyOutcome verify_path(const HashConfig& cfg, const Digest& expected_root, const PathBits& path,
                          const Digest& leaf, const PathProof& proof) {
  if (!well_formed(cfg, proof) || path.size() != cfg.path_height) {
    return VerifyOutcome::Invalid(InvalidReason::BadLength);
  }
  const std::size_t h = cfg.path_height;
  if (!(proof.pairs[h - 1][path[h - 1]] == leaf)) return VerifyOutcome::Invalid(InvalidReason::LeafMismatch);
  for (std::size_t i = 0; i + 1 < h; ++i) {
    const auto& below = proof.pairs[i + 1];
    if (!(proof.pairs[i][path[i]] == digest_pair(cfg, below[0], below[1]))) {
      return VerifyOutcome::Invalid(InvalidReason::ChainBreak, i);
    }
  }
  if (!(proof_root(cfg, proof) == expected_root)) return VerifyOutcome::Invalid(InvalidReason::RootMismatch);
  return VerifyOutcome::Valid();
}

VerifyOutcome verify_reply(const HashConfig& cfg, const EmptyTable& empties, const Digest& expected_root,
                           ByteView key, const Reply& reply, const PathProof& proof) {
  const Digest leaf = reply.present ? digest(cfg, reply.value) : empties[0];
  return verify_path(cfg, expected_root, key_path(cfg, key), leaf, proof);
}

Digest updated_root_path(const HashConfig& cfg, const PathBits& path, const PathProof& proof,
                         const Digest& new_leaf) {
  if (!well_formed(cfg, proof) || path.size() != cfg.path_height) throw ProofError("proof has the wrong shape");
  const std::size_t h = cfg.path_height;
  for (std::size_t i = 0; i + 1 < h; ++i) {
    const auto& below = proof.pairs[i + 1];
    if (!(proof.pairs[i][path[i]] == digest_pair(cfg, below[0], below[1]))) {
      throw ProofError("proof does not chain at level " + std::to_string(i));
    }
  }
  Digest running = new_leaf;
  for (std::size_t i = h; i-- > 0;) {
    HashPair p = proof.pairs[i];
    p[path[i]] = running;
    running = digest_pair(cfg, p[0], p[1]);
  }
  return running;
}

Digest updated_root(const HashConfig& cfg, const EmptyTable& /*empties*/, ByteView key, const PathProof& proof,
                    const Digest& new_leaf) {
  return updated_root_path(cfg, key_path(cfg, key), proof, new_leaf);
}

std::optional<PathBits> implied_path(const HashConfig& cfg, const PathProof& proof, const Digest& leaf) {
  if (!well_formed(cfg, proof)) return std::nullopt;
  const std::size_t h = cfg.path_height;
  PathBits path = PathBits::from_bools(std::vector<bool>(h, false));
  const auto& last = proof.pairs[h - 1];
  if (last[0] == leaf) {
    path.set(h - 1, false);
  } else if (last[1] == leaf) {
    path.set(h - 1, true);
  } else {
    return std::nullopt;
  }
  for (std::size_t i = h - 1; i-- > 0;) {
    const auto& below = proof.pairs[i + 1];
    const Digest up = digest_pair(cfg, below[0], below[1]);
    if (proof.pairs[i][0] == up) {
      path.set(i, false);
    } else if (proof.pairs[i][1] == up) {
      path.set(i, true);
    } else {
      return std::nullopt;
    }
  }
  return path;
}

Bytes encode_proof(const PathProof& proof) {
  Bytes out;
  if (!proof.pairs.empty()) out.reserve(proof.size() * 2 * proof.pairs[0][0].size());
  for (const auto& p : proof.pairs) {
    append(out, p[0].view());
    append(out, p[1].view());
  }
  return out;
}

PathProof decode_proof(const HashConfig& cfg, ByteView bytes) {
  if (bytes.size() != cfg.proof_bytes()) throw ProofError("BadLength: proof must be exactly 2*H*L bytes");
  PathProof proof;
  proof.pairs.reserve(cfg.path_height);
  const std::size_t l = cfg.digest_len;
  for (std::size_t i = 0; i < cfg.path_height; ++i) {
    const auto base = bytes.subspan(2 * i * l);
    proof.pairs.push_back({Digest(base.subspan(0, l)), Digest(base.subspan(l, l))});
  }
  return proof;
}

}  // namespace kht
