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
#include <map>
#include <vector>

#include "kht/hash.hpp"
#include "kht/path_proof.hpp"

namespace kht::oracle {

inline constexpr std::size_t kMaxDenseHeight = 12;

/// Fully materialised keyed hash tree, heap indexed (root at 0, children of i
/// at 2i+1 and 2i+2). Ground truth for the sparse representation; shares no
/// traversal code with it. Refuses heights above kMaxDenseHeight.
class DenseTree {
 public:
  explicit DenseTree(const HashConfig& cfg);

  /// Leaf slot for a key: first H bits of digest(key), read as an integer.
  std::size_t leaf_slot(ByteView key) const;

  void set(ByteView key, const Digest& value);
  void clear(ByteView key);
  bool occupied(ByteView key) const;

  Digest root() const;
  PathProof proof(ByteView key) const;
  const Digest& node(std::size_t heap_index) const;
  std::size_t node_total() const { return nodes_.size(); }

 private:
  void refresh_up(std::size_t heap_index);

  HashConfig cfg_;
  std::size_t leaves_;
  Digest empty_leaf_;
  std::vector<Digest> nodes_;
};

/// Entries must map to pairwise distinct leaf slots; throws std::invalid_argument otherwise.
Digest dense_root(const std::map<Bytes, Digest>& entries, const HashConfig& cfg);
PathProof dense_proof(const std::map<Bytes, Digest>& entries, ByteView key, const HashConfig& cfg);

/// Root of a dense tree of the given height whose leaves are all h("").
Digest dense_empty_root(const HashConfig& cfg, std::size_t height);

}  // namespace kht::oracle
