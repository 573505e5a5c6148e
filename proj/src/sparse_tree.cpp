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

#include "kht/sparse_tree.hpp"

#include <string>

namespace kht {

namespace {

std::unique_ptr<TreeNode> clone(const TreeNode* n) {
  if (n == nullptr) return nullptr;
  auto c = std::make_unique<TreeNode>();
  c->entry = n->entry;
  c->split = n->split;
  c->route = n->route;
  c->hash = n->hash;
  c->child[0] = clone(n->child[0].get());
  c->child[1] = clone(n->child[1].get());
  return c;
}

std::size_t count_nodes(const TreeNode* n) {
  if (n == nullptr) return 0;
  return 1 + count_nodes(n->child[0].get()) + count_nodes(n->child[1].get());
}

}  // namespace

Digest subtree_hash_single(const HashConfig& cfg, const EmptyTable& empties, const PathBits& remaining,
                           const Digest& value_digest) {
  Digest running = value_digest;
  const std::size_t len = remaining.size();
  for (std::size_t t = len; t-- > 0;) {
    const Digest& empty = empties[len - 1 - t];
    running = remaining[t] ? digest_pair(cfg, empty, running) : digest_pair(cfg, running, empty);
  }
  return running;
}

SparseTree::SparseTree(const HashConfig& cfg)
    : SparseTree(cfg, std::make_shared<const EmptyTable>(cfg)) {}

SparseTree::SparseTree(const HashConfig& cfg, std::shared_ptr<const EmptyTable> empties, PathBits prefix)
    : cfg_(cfg), empties_(std::move(empties)), prefix_(prefix) {
  cfg_.validate();
  if (!empties_ || empties_->size() != cfg_.path_height + 1) throw std::invalid_argument("empty table mismatch");
  if (prefix_.size() > cfg_.path_height) throw std::invalid_argument("prefix longer than path height");
}

SparseTree::SparseTree(const SparseTree& other)
    : cfg_(other.cfg_),
      empties_(other.empties_),
      prefix_(other.prefix_),
      root_(clone(other.root_.get())),
      entries_(other.entries_) {}

SparseTree& SparseTree::operator=(const SparseTree& other) {
  if (this != &other) {
    SparseTree copy(other);
    *this = std::move(copy);
  }
  return *this;
}

Digest SparseTree::root_digest() const { return root_ ? root_->hash : (*empties_)[height()]; }

std::size_t SparseTree::node_count() const { return count_nodes(root_.get()); }

Digest SparseTree::lift(const PathBits& route, std::size_t from, std::size_t to, const Digest& inner) const {
  const std::size_t h = cfg_.path_height;
  Digest running = inner;
  for (std::size_t t = from; t-- > to;) {
    const Digest& empty = (*empties_)[h - 1 - t];
    running = route[t] ? digest_pair(cfg_, empty, running) : digest_pair(cfg_, running, empty);
  }
  return running;
}

Digest SparseTree::leaf_hash(const PathBits& path, std::size_t depth, const Digest& value) const {
  return lift(path, cfg_.path_height, depth, value);
}

Digest SparseTree::branch_hash(const TreeNode& node, std::size_t depth) const {
  const Digest& empty = (*empties_)[cfg_.path_height - node.split - 1];
  const Digest& left = node.child[0] ? node.child[0]->hash : empty;
  const Digest& right = node.child[1] ? node.child[1]->hash : empty;
  return lift(node.route, node.split, depth, digest_pair(cfg_, left, right));
}

std::unique_ptr<TreeNode> SparseTree::make_leaf(const PathBits& path, std::size_t depth, const Digest& value) const {
  auto n = std::make_unique<TreeNode>();
  n->entry = LeafEntry{path, value};
  n->hash = leaf_hash(path, depth, value);
  return n;
}

void SparseTree::rehash(TreeNode& node, std::size_t depth) const {
  node.hash = node.is_leaf() ? leaf_hash(node.entry->path, depth, node.entry->value_digest)
                             : branch_hash(node, depth);
}

void SparseTree::check_prefix(const PathBits& path) const {
  if (path.size() != cfg_.path_height) throw std::invalid_argument("path length differs from tree height");
  if (path.common_prefix(prefix_) < prefix_.size()) throw std::invalid_argument("path outside this tree's prefix");
}

bool SparseTree::insert(ByteView key, const Digest& value_digest) {
  return insert_path(key_path(cfg_, key), value_digest);
}

bool SparseTree::insert_path(const PathBits& path, const Digest& value_digest) {
  if (value_digest.size() != cfg_.digest_len) throw std::invalid_argument("digest length mismatch");
  if (value_digest == (*empties_)[0]) throw std::invalid_argument("empty-leaf digest cannot be stored; use erase");
  check_prefix(path);
  const bool fresh = insert_at(root_, prefix_.size(), path, value_digest);
  if (fresh) ++entries_;
  return fresh;
}

bool SparseTree::insert_at(std::unique_ptr<TreeNode>& slot, std::size_t depth, const PathBits& path,
                           const Digest& value) {
  if (!slot) {
    // virgin sub-tree
    slot = make_leaf(path, depth, value);
    return true;
  }
  if (slot->is_leaf() && slot->entry->path == path) {
    slot->entry->value_digest = value;
    rehash(*slot, depth);
    return false;
  }
  const PathBits& here = slot->is_leaf() ? slot->entry->path : slot->route;
  const std::size_t part = here.common_prefix(path);
  if (slot->is_leaf() || part < slot->split) {
    // The new path leaves this node's sub-tree at bit `part`. Pushing the old
    // node down one step at a time until the paths part gives a stalk of
    // single-child levels ending in a fork; the fork is stored, the stalk is
    // folded into its hash.
    auto fork = std::make_unique<TreeNode>();
    fork->split = part;
    fork->route = path;
    auto old = std::move(slot);
    rehash(*old, part + 1);
    fork->child[here[part]] = std::move(old);
    fork->child[path[part]] = make_leaf(path, part + 1, value);
    rehash(*fork, depth);
    slot = std::move(fork);
    return true;
  }
  const std::size_t split = slot->split;
  const bool fresh = insert_at(slot->child[path[split]], split + 1, path, value);
  rehash(*slot, depth);
  return fresh;
}

void SparseTree::erase(ByteView key) { erase_path(key_path(cfg_, key)); }

void SparseTree::erase_path(const PathBits& path) {
  check_prefix(path);
  if (!erase_at(root_, prefix_.size(), path)) throw NoSuchEntry();
  --entries_;
}

bool SparseTree::erase_at(std::unique_ptr<TreeNode>& slot, std::size_t depth, const PathBits& path) {
  if (!slot) return false;
  if (slot->is_leaf()) {
    if (!(slot->entry->path == path)) return false;
    slot.reset();
    return true;
  }
  const std::size_t split = slot->split;
  if (slot->route.common_prefix(path) < split) return false;
  if (!erase_at(slot->child[path[split]], split + 1, path)) return false;
  if (!slot->child[0] || !slot->child[1]) {
    // one child left: it moves up to this node's place, which removes the
    // stalk the two children used to hang from
    auto only = std::move(slot->child[slot->child[0] ? 0 : 1]);
    slot = std::move(only);
  }
  rehash(*slot, depth);
  return true;
}

std::optional<Digest> SparseTree::lookup_digest(ByteView key) const { return lookup_path(key_path(cfg_, key)); }

std::optional<Digest> SparseTree::lookup_path(const PathBits& path) const {
  if (path.size() != cfg_.path_height || path.common_prefix(prefix_) < prefix_.size()) return std::nullopt;
  const TreeNode* n = root_.get();
  while (n != nullptr && !n->is_leaf()) n = n->child[path[n->split]].get();
  if (n != nullptr && n->entry->path == path) return n->entry->value_digest;
  return std::nullopt;
}

PathProof SparseTree::rootpath(ByteView key) const { return rootpath_path(key_path(cfg_, key)); }

PathProof SparseTree::rootpath_path(const PathBits& path) const {
  check_prefix(path);
  const std::size_t h = cfg_.path_height;
  const auto& empty = *empties_;
  PathProof proof;
  proof.pairs.reserve(height());

  const TreeNode* n = root_.get();
  std::size_t depth = prefix_.size();
  std::vector<HashPair> chain;
  while (n != nullptr) {
    // The node covers levels [depth, bottom): a stalk along `route`, then the
    // fork pair at `bottom` for a BRANCH. A LEAF's stalk runs to the leaf layer.
    const bool leaf = n->is_leaf();
    const PathBits& route = leaf ? n->entry->path : n->route;
    const std::size_t bottom = leaf ? h : n->split;
    Digest running;
    HashPair fork;
    if (leaf) {
      running = n->entry->value_digest;
    } else {
      const Digest& e = empty[h - bottom - 1];
      fork = {n->child[0] ? n->child[0]->hash : e, n->child[1] ? n->child[1]->hash : e};
      running = digest_pair(cfg_, fork[0], fork[1]);
    }
    chain.assign(bottom - depth, HashPair{});
    for (std::size_t t = bottom; t-- > depth;) {
      const bool bit = route[t];
      HashPair& p = chain[t - depth];
      p[bit] = running;
      p[!bit] = empty[h - 1 - t];
      running = digest_pair(cfg_, p[0], p[1]);
    }
    const std::size_t diverge = route.common_prefix(path);
    if (diverge < bottom) {
      // the query leaves the stored structure inside this stalk; below the
      // divergence level its side is empty
      const std::size_t top = depth;
      for (; depth <= diverge; ++depth) proof.pairs.push_back(chain[depth - top]);
      break;
    }
    for (const auto& p : chain) proof.pairs.push_back(p);
    depth = bottom;
    if (leaf) break;
    proof.pairs.push_back(fork);
    n = n->child[path[bottom]].get();
    ++depth;
  }
  for (; depth < h; ++depth) proof.pairs.push_back({empty[h - depth - 1], empty[h - depth - 1]});
  return proof;
}

std::size_t SparseTree::traversal_length(const PathBits& path) const {
  std::size_t visited = 0;
  const TreeNode* n = root_.get();
  while (n != nullptr) {
    ++visited;
    if (n->is_leaf() || n->route.common_prefix(path) < n->split) break;
    n = n->child[path[n->split]].get();
  }
  return visited;
}

std::vector<std::size_t> SparseTree::leaf_depths() const {
  std::vector<std::size_t> out;
  out.reserve(entries_);
  std::vector<std::pair<const TreeNode*, std::size_t>> stack;
  if (root_) stack.emplace_back(root_.get(), prefix_.size());
  while (!stack.empty()) {
    auto [n, d] = stack.back();
    stack.pop_back();
    if (n->is_leaf()) {
      out.push_back(d);
      continue;
    }
    for (const auto& c : n->child)
      if (c) stack.emplace_back(c.get(), n->split + 1);
  }
  return out;
}

void SparseTree::for_each_entry(const std::function<void(const LeafEntry&)>& fn) const {
  std::vector<const TreeNode*> stack;
  if (root_) stack.push_back(root_.get());
  while (!stack.empty()) {
    const TreeNode* n = stack.back();
    stack.pop_back();
    if (n->is_leaf()) {
      fn(*n->entry);
      continue;
    }
    for (const auto& c : n->child)
      if (c) stack.push_back(c.get());
  }
}

void SparseTree::adopt(std::unique_ptr<TreeNode> root, std::size_t entries) {
  root_ = std::move(root);
  entries_ = entries;
}

void SparseTree::check_invariants() const {
  std::size_t leaves = 0;
  std::function<void(const TreeNode&, std::size_t, PathBits&)> walk = [&](const TreeNode& n, std::size_t depth,
                                                                        PathBits& pos) {
    auto fail = [&](const std::string& what) {
      throw std::logic_error(what + " at depth " + std::to_string(depth) + " position " + pos.str());
    };
    if (n.is_leaf()) {
      ++leaves;
      if (n.child[0] || n.child[1]) fail("leaf with children");
      if (n.entry->path.common_prefix(pos) < depth) fail("entry path does not pass through its node");
      if (n.entry->value_digest == (*empties_)[0]) fail("stored empty digest");
      if (!(n.hash == leaf_hash(n.entry->path, depth, n.entry->value_digest))) fail("stale leaf hash");
      return;
    }
    if (!n.child[0] || !n.child[1]) fail("branch without two children");
    if (n.split < depth || n.split >= cfg_.path_height) fail("split outside the node's levels");
    for (std::size_t i = depth; i < n.split; ++i) pos.set(i, n.route[i]);
    for (int b = 0; b < 2; ++b) {
      pos.set(n.split, b != 0);
      walk(*n.child[b], n.split + 1, pos);
    }
    if (!(n.hash == branch_hash(n, depth))) fail("stale branch hash");
  };
  if (root_) {
    PathBits pos = PathBits::from_bools(std::vector<bool>(cfg_.path_height, false));
    for (std::size_t i = 0; i < prefix_.size(); ++i) pos.set(i, prefix_[i]);
    walk(*root_, prefix_.size(), pos);
  }
  if (leaves != entries_) throw std::logic_error("entry count disagrees with leaf count");
}

}  // namespace kht
