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
#include <vector>

#include "kht/hash.hpp"
#include "kht/path_proof.hpp"
#include "kht/sparse_tree.hpp"

namespace kht {

inline constexpr std::size_t kMaxShardBits = 8;

/// Shard owning `key`: the integer value of its first d path bits.
std::size_t shard_index(const HashConfig& cfg, ByteView key, std::size_t d);

/// Folds 2^d shard roots (each the root of the height H-d sub-tree under its
/// d-bit prefix, in prefix order) up to the full tree root. Throws
/// std::invalid_argument on a wrong count or d > 8.
Digest combine_shard_roots(const std::vector<Digest>& roots, std::size_t d, const HashConfig& cfg,
                           const EmptyTable& empties);

/// The table split over 2^d independent sub-trees by path prefix. Only the
/// top 2^(d+1)-1 hashes are computed across shards.
class ShardedTree {
 public:
  ShardedTree(const HashConfig& cfg, std::size_t d);

  std::size_t bits() const { return d_; }
  SparseTree& shard(std::size_t i) { return shards_.at(i); }
  const SparseTree& shard(std::size_t i) const { return shards_.at(i); }
  std::size_t shard_count() const { return shards_.size(); }

  bool insert(ByteView key, const Digest& value_digest);
  void erase(ByteView key);
  Digest root_digest() const;
  /// Full-height proof: top d pairs from the shard roots, the rest from the shard.
  PathProof rootpath(ByteView key) const;

 private:
  HashConfig cfg_;
  std::size_t d_;
  std::shared_ptr<const EmptyTable> empties_;
  std::vector<SparseTree> shards_;
};

}  // namespace kht
