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

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "kht/hash.hpp"
#include "kht/path_proof.hpp"

namespace kht {

/// A database answer to a lookup: the full stored value, or "no such entry".
struct Reply {
  bool present = false;
  Bytes value;

  static Reply Present(Bytes v) { return {true, std::move(v)}; }
  static Reply Absent() { return {false, {}}; }
  friend bool operator==(const Reply&, const Reply&) = default;
};

enum class InvalidReason { LeafMismatch, ChainBreak, RootMismatch, BadLength };

struct VerifyOutcome {
  bool valid = true;
  InvalidReason reason = InvalidReason::BadLength;
  /// Pair index whose on-path element failed to match (ChainBreak only).
  std::size_t level = 0;

  static VerifyOutcome Valid() { return {}; }
  static VerifyOutcome Invalid(InvalidReason r, std::size_t level = 0) { return {false, r, level}; }
  explicit operator bool() const { return valid; }
  std::string str() const;
};

class ProofError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Checks, in order: length, leaf element against digest(value) or E[0],
/// chaining from the root level down, and the resolved root.
VerifyOutcome verify_reply(const HashConfig& cfg, const EmptyTable& empties, const Digest& expected_root,
                           ByteView key, const Reply& reply, const PathProof& proof);

/// Same checks for a known path and expected leaf-layer element.
VerifyOutcome verify_path(const HashConfig& cfg, const Digest& expected_root, const PathBits& path,
                          const Digest& leaf, const PathProof& proof);

/// Root the proof resolves to: digest(pairs[0].left || pairs[0].right).
Digest proof_root(const HashConfig& cfg, const PathProof& proof);

/// Root after replacing the on-path leaf element with `new_leaf` (E[0] for a
/// deletion). Throws ProofError if the proof does not chain along the path.
Digest updated_root(const HashConfig& cfg, const EmptyTable& empties, ByteView key, const PathProof& proof,
                    const Digest& new_leaf);
Digest updated_root_path(const HashConfig& cfg, const PathBits& path, const PathProof& proof,
                         const Digest& new_leaf);

/// The path a proof actually follows down to `leaf`, if one exists: at every
/// level one side must equal the digest of the pair below, and the leaf pair
/// must hold `leaf`. Used to tell a relabelled entry from a changed one.
std::optional<PathBits> implied_path(const HashConfig& cfg, const PathProof& proof, const Digest& leaf);

/// H pairs x 2 digests x L bytes, root level first, left before right.
Bytes encode_proof(const PathProof& proof);
/// Throws ProofError unless `bytes` is exactly 2*H*L long.
PathProof decode_proof(const HashConfig& cfg, ByteView bytes);

}  // namespace kht
