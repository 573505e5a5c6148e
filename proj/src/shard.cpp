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

#include "kht/shard.hpp"

#include <stdexcept>

namespace kht {

std::size_t shard_index(const HashConfig& cfg, ByteView key, std::size_t d) {
  if (d > kMaxShardBits || d > cfg.path_height) throw std::invalid_argument("too many shard bits");
  return key_path(cfg, key).prefix_index(d);
}

Digest combine_shard_roots(const std::vector<Digest>& roots, std::size_t d, const HashConfig& cfg,
                           const EmptyTable& /*empties*/) {
  if (d > kMaxShardBits || d > cfg.path_height) throw std::invalid_argument("too many shard bits");
  if (roots.size() != (std::size_t{1} << d)) throw std::invalid_argument("need exactly 2^d shard roots");
  std::vector<Digest> layer = roots;
  while (layer.size() > 1) {
    std::vector<Digest> up(layer.size() / 2);
    for (std::size_t i = 0; i < up.size(); ++i) up[i] = digest_pair(cfg, layer[2 * i], layer[2 * i + 1]);
    layer = std::move(up);
  }
  return layer.front();
}

ShardedTree::ShardedTree(const HashConfig& cfg, std::size_t d)
    : cfg_(cfg), d_(d), empties_(std::make_shared<const EmptyTable>(cfg)) {
  if (d > kMaxShardBits || d > cfg.path_height) throw std::invalid_argument("too many shard bits");
  const std::size_t count = std::size_t{1} << d;
  shards_.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<bool> prefix(d);
    for (std::size_t b = 0; b < d; ++b) prefix[b] = (i >> (d - 1 - b)) & 1U;
    shards_.emplace_back(cfg, empties_, PathBits::from_bools(prefix));
  }
}

bool ShardedTree::insert(ByteView key, const Digest& value_digest) {
  const PathBits path = key_path(cfg_, key);
  return shards_[path.prefix_index(d_)].insert_path(path, value_digest);
}

void ShardedTree::erase(ByteView key) {
  const PathBits path = key_path(cfg_, key);
  shards_[path.prefix_index(d_)].erase_path(path);
}

Digest ShardedTree::root_digest() const {
  std::vector<Digest> roots;
  roots.reserve(shards_.size());
  for (const auto& s : shards_) roots.push_back(s.root_digest());
  return combine_shard_roots(roots, d_, cfg_, *empties_);
}

PathProof ShardedTree::rootpath(ByteView key) const {
  const PathBits path = key_path(cfg_, key);
  // layers[k] holds the 2^k hashes at depth k of the top of the tree
  std::vector<std::vector<Digest>> layers(d_ + 1);
  for (const auto& s : shards_) layers[d_].push_back(s.root_digest());
  for (std::size_t k = d_; k-- > 0;) {
    for (std::size_t i = 0; i < (std::size_t{1} << k); ++i) {
      layers[k].push_back(digest_pair(cfg_, layers[k + 1][2 * i], layers[k + 1][2 * i + 1]));
    }
  }
  PathProof proof;
  std::size_t idx = 0;
  for (std::size_t k = 0; k < d_; ++k) {
    proof.pairs.push_back({layers[k + 1][2 * idx], layers[k + 1][2 * idx + 1]});
    idx = 2 * idx + (path[k] ? 1 : 0);
  }
  const PathProof below = shards_[idx].rootpath_path(path);
  proof.pairs.insert(proof.pairs.end(), below.pairs.begin(), below.pairs.end());
  return proof;
}

}  // namespace kht
