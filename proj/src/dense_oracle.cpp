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

#include "kht/dense_oracle.hpp"

#include <stdexcept>

namespace kht::oracle {

DenseTree::DenseTree(const HashConfig& cfg) : cfg_(cfg) {
  cfg.validate();
  if (cfg.path_height > kMaxDenseHeight) throw std::invalid_argument("dense oracle refuses heights above 12");
  leaves_ = std::size_t{1} << cfg.path_height;
  empty_leaf_ = digest(cfg, ByteView{});
  nodes_.assign(2 * leaves_ - 1, empty_leaf_);
  // plain bottom-up rebuild, one hash per internal node
  for (std::size_t i = leaves_ - 1; i-- > 0;) {
    nodes_[i] = digest_pair(cfg_, nodes_[2 * i + 1], nodes_[2 * i + 2]);
  }
}

std::size_t DenseTree::leaf_slot(ByteView key) const {
  const Digest d = digest(cfg_, key);
  std::size_t slot = 0;
  for (std::size_t bit = 0; bit < cfg_.path_height; ++bit) {
    const unsigned byte = d.data()[bit / 8];
    slot = (slot << 1) | ((byte >> (7 - bit % 8)) & 1U);
  }
  return slot;
}

void DenseTree::set(ByteView key, const Digest& value) {
  const std::size_t idx = leaves_ - 1 + leaf_slot(key);
  nodes_[idx] = value;
  refresh_up(idx);
}

void DenseTree::clear(ByteView key) { set(key, empty_leaf_); }

bool DenseTree::occupied(ByteView key) const { return !(nodes_[leaves_ - 1 + leaf_slot(key)] == empty_leaf_); }

void DenseTree::refresh_up(std::size_t idx) {
  while (idx > 0) {
    idx = (idx - 1) / 2;
    nodes_[idx] = digest_pair(cfg_, nodes_[2 * idx + 1], nodes_[2 * idx + 2]);
  }
}

Digest DenseTree::root() const { return nodes_[0]; }

const Digest& DenseTree::node(std::size_t heap_index) const { return nodes_.at(heap_index); }

PathProof DenseTree::proof(ByteView key) const {
  const std::size_t slot = leaf_slot(key);
  PathProof p;
  std::size_t idx = 0;
  for (std::size_t depth = 0; depth < cfg_.path_height; ++depth) {
    p.pairs.push_back({nodes_[2 * idx + 1], nodes_[2 * idx + 2]});
    const std::size_t bit = (slot >> (cfg_.path_height - 1 - depth)) & 1U;
    idx = 2 * idx + 1 + bit;
  }
  return p;
}

namespace {

DenseTree build(const std::map<Bytes, Digest>& entries, const HashConfig& cfg) {
  DenseTree t(cfg);
  std::vector<bool> used(std::size_t{1} << cfg.path_height, false);
  for (const auto& [key, value] : entries) {
    const std::size_t slot = t.leaf_slot(key);
    if (used[slot]) throw std::invalid_argument("two keys share a leaf slot");
    used[slot] = true;
    t.set(key, value);
  }
  return t;
}

}  // namespace

Digest dense_root(const std::map<Bytes, Digest>& entries, const HashConfig& cfg) {
  return build(entries, cfg).root();
}

PathProof dense_proof(const std::map<Bytes, Digest>& entries, ByteView key, const HashConfig& cfg) {
  return build(entries, cfg).proof(key);
}

Digest dense_empty_root(const HashConfig& cfg, std::size_t height) {
  if (height > kMaxDenseHeight) throw std::invalid_argument("dense oracle refuses heights above 12");
  std::vector<Digest> layer(std::size_t{1} << height, digest(cfg, ByteView{}));
  while (layer.size() > 1) {
    std::vector<Digest> up(layer.size() / 2);
    for (std::size_t i = 0; i < up.size(); ++i) up[i] = digest_pair(cfg, layer[2 * i], layer[2 * i + 1]);
    layer = std::move(up);
  }
  return layer.front();
}

}  // namespace kht::oracle
