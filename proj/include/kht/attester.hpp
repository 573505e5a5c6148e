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

#include <memory>
#include <optional>
#include <set>
#include <utility>

#include "kht/hash.hpp"
#include "kht/path_proof.hpp"
#include "kht/sparse_tree.hpp"

namespace kht {

enum class AttesterVerdict { Accept, Reject, Error };
const char* to_string(AttesterVerdict v);

using KeySet = std::set<Bytes>;

/// Membership attester over a keyed hash tree that stores (key, h(key)).
///
/// D(S) is the tree root, P(x, S) the pairs along h(x), V checks them. The
/// empty key is replaced by the reserved key tau = 0xFF repeated L+1 times;
/// a caller-supplied key equal to tau is refused. Two members sharing a leaf
/// path (possible only for short paths) are refused as well.
class Attester {
 public:
  explicit Attester(const HashConfig& cfg);

  const HashConfig& config() const { return cfg_; }
  const EmptyTable& empties() const { return *empties_; }
  Bytes tau() const { return Bytes(cfg_.digest_len + 1, 0xFF); }
  /// tau for the empty key, the key itself otherwise.
  Bytes effective_key(ByteView x) const;

  SparseTree key_tree(const KeySet& s) const;
  Digest D(const KeySet& s) const;
  PathProof P(const KeySet& s, ByteView x) const;
  AttesterVerdict V(ByteView x, const Digest& d, const PathProof& p) const;

  /// Given proofs that Accept and Reject the same (x, d), returns two distinct
  /// byte strings with equal digests. Scans both proofs from the root for the
  /// first level whose pairs differ; both pairs hash to the same parent there.
  std::optional<std::pair<Bytes, Bytes>> extract_collision(ByteView x, const Digest& d, const PathProof& accept,
                                                           const PathProof& reject) const;

 private:
  HashConfig cfg_;
  std::shared_ptr<const EmptyTable> empties_;
};

inline Digest attester_D(const KeySet& s, const HashConfig& cfg) { return Attester(cfg).D(s); }
inline PathProof attester_P(const KeySet& s, ByteView x, const HashConfig& cfg) { return Attester(cfg).P(s, x); }
inline AttesterVerdict attester_V(ByteView x, const Digest& d, const PathProof& p, const HashConfig& cfg) {
  return Attester(cfg).V(x, d, p);
}

}  // namespace kht
