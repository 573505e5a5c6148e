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
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "kht/hash.hpp"
#include "kht/path_proof.hpp"

namespace kht {

class NoSuchEntry : public std::runtime_error {
 public:
  NoSuchEntry() : std::runtime_error("no such entry") {}
};

/// Entry carried by a LEAF node. `path` is the full key path; the part below
/// the owning node (`remaining(depth)`) is generated on demand, never stored
/// as nodes.
struct LeafEntry {
  PathBits path;
  Digest value_digest;

  PathBits remaining(std::size_t depth) const { return path.suffix(depth); }
};

/// A stored node, attached to its parent at some depth a. LEAF nodes carry
/// an entry and no children. BRANCH nodes carry exactly two children: every
/// entry below shares the bits [a, split) of `route`, and the children part
/// at bit `split` and attach at depth split + 1. A run of single-child levels
/// (a stalk) is therefore never stored as nodes. `hash` is the root of the
/// dense sub-tree at the attach depth.
struct TreeNode {
  std::array<std::unique_ptr<TreeNode>, 2> child;
  std::optional<LeafEntry> entry;
  std::size_t split = 0;
  PathBits route;
  Digest hash;

  bool is_leaf() const { return entry.has_value(); }
};

/// Root of the height-|remaining| sub-tree holding a single value at the end
/// of `remaining`, all other leaves empty. Folds from the leaf upwards.
Digest subtree_hash_single(const HashConfig& cfg, const EmptyTable& empties, const PathBits& remaining,
                           const Digest& value_digest);

/// Sparse representation of the keyed hash tree: only nodes where paths to
/// non-empty leaves part are stored, and a sub-tree holding exactly one entry
/// is a single LEAF node. n entries take 2n - 1 nodes.
///
/// A tree may also stand for the sub-tree below a fixed path prefix (one shard
/// of a distributed table). Its nodes then start at depth `prefix.size()` and
/// proofs cover only the levels below the prefix.
///
/// Mutations must be externally serialised; const members may run
/// concurrently with each other. Recursion depth is bounded by H + 2 frames.
class SparseTree {
 public:
  explicit SparseTree(const HashConfig& cfg);
  SparseTree(const HashConfig& cfg, std::shared_ptr<const EmptyTable> empties, PathBits prefix = {});

  SparseTree(const SparseTree& other);
  SparseTree& operator=(const SparseTree& other);
  SparseTree(SparseTree&&) noexcept = default;
  SparseTree& operator=(SparseTree&&) noexcept = default;
  ~SparseTree() = default;

  const HashConfig& config() const { return cfg_; }
  const EmptyTable& empties() const { return *empties_; }
  std::shared_ptr<const EmptyTable> shared_empties() const { return empties_; }
  const PathBits& prefix() const { return prefix_; }
  /// Height of the represented (sub-)tree: H minus the prefix length.
  std::size_t height() const { return cfg_.path_height - prefix_.size(); }

  Digest root_digest() const;
  /// Number of stored entries (LEAF nodes).
  std::size_t size() const { return entries_; }
  bool empty() const { return entries_ == 0; }
  std::size_t node_count() const;

  /// Inserts or replaces. Throws std::invalid_argument for value_digest == E[0]
  /// or a path outside this tree's prefix. Returns true if the key was new.
  bool insert(ByteView key, const Digest& value_digest);
  bool insert_path(const PathBits& path, const Digest& value_digest);

  /// Throws NoSuchEntry (tree unchanged) when nothing is stored at the path.
  void erase(ByteView key);
  void erase_path(const PathBits& path);

  std::optional<Digest> lookup_digest(ByteView key) const;
  std::optional<Digest> lookup_path(const PathBits& path) const;

  /// Sibling pairs along the path, root level first; works for absent keys.
  PathProof rootpath(ByteView key) const;
  PathProof rootpath_path(const PathBits& path) const;

  /// Stored nodes visited walking `path` before leaving the stored structure.
  std::size_t traversal_length(const PathBits& path) const;
  /// Absolute depth of every LEAF node (the level it attaches at).
  std::vector<std::size_t> leaf_depths() const;
  void for_each_entry(const std::function<void(const LeafEntry&)>& fn) const;

  /// Full structural audit: hashes, shape rules, entry count. Throws
  /// std::logic_error describing the first violation.
  void check_invariants() const;

  /// Installs a pre-built node structure (used by the bulk builders).
  void adopt(std::unique_ptr<TreeNode> root, std::size_t entries);
  const TreeNode* root_node() const { return root_.get(); }

  // Hash helpers shared with the bulk builders. Depths are absolute (0 = top
  // of the full tree) and name the depth the node attaches at.
  Digest leaf_hash(const PathBits& path, std::size_t depth, const Digest& value) const;
  Digest branch_hash(const TreeNode& node, std::size_t depth) const;
  /// Folds `inner`, the root at depth `from`, up to depth `to` along `route`
  /// with empty siblings.
  Digest lift(const PathBits& route, std::size_t from, std::size_t to, const Digest& inner) const;

 private:
  void check_prefix(const PathBits& path) const;
  bool insert_at(std::unique_ptr<TreeNode>& slot, std::size_t depth, const PathBits& path, const Digest& value);
  bool erase_at(std::unique_ptr<TreeNode>& slot, std::size_t depth, const PathBits& path);
  std::unique_ptr<TreeNode> make_leaf(const PathBits& path, std::size_t depth, const Digest& value) const;
  void rehash(TreeNode& node, std::size_t depth) const;

  HashConfig cfg_;
  std::shared_ptr<const EmptyTable> empties_;
  PathBits prefix_;
  std::unique_ptr<TreeNode> root_;
  std::size_t entries_ = 0;
};

inline SparseTree new_tree(const HashConfig& cfg) { return SparseTree(cfg); }

}  // namespace kht
