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

#include "kht/kernels.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace kht::kernels {

namespace {

bool path_less(const PathEntry& a, const PathEntry& b) {
  const std::size_t c = a.path.common_prefix(b.path);
  if (c == a.path.size()) return false;
  return !a.path[c] && b.path[c];
}

// Forks above this depth become OpenMP tasks; deeper ones are built inline.
constexpr std::size_t kTaskDepth = 6;

struct Builder {
  const SparseTree& shape;  // hash helpers only
  const std::vector<PathEntry>& entries;
  std::size_t height;

  std::unique_ptr<TreeNode> build(std::size_t lo, std::size_t hi, std::size_t depth, bool fork) const {
    auto node = std::make_unique<TreeNode>();
    if (hi - lo == 1) {
      node->entry = LeafEntry{entries[lo].path, entries[lo].value};
      node->hash = shape.leaf_hash(entries[lo].path, depth, entries[lo].value);
      return node;
    }
    // sorted and distinct: first and last bound the common prefix of the range
    const std::size_t split = entries[lo].path.common_prefix(entries[hi - 1].path);
    node->split = split;
    node->route = entries[lo].path;
    std::size_t mid = lo;
    while (mid < hi && !entries[mid].path[split]) ++mid;
    const bool spawn = fork && depth < kTaskDepth;
    std::unique_ptr<TreeNode> left;
    std::unique_ptr<TreeNode> right;
#ifdef _OPENMP
#pragma omp task shared(left) if (spawn)
#endif
    left = build(lo, mid, split + 1, spawn);
    right = build(mid, hi, split + 1, spawn);
#ifdef _OPENMP
#pragma omp taskwait
#endif
    node->child[0] = std::move(left);
    node->child[1] = std::move(right);
    node->hash = shape.branch_hash(*node, depth);
    return node;
  }
};

}  // namespace

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::vector<PathEntry> hash_entries_serial(const HashConfig& cfg, const std::vector<std::pair<Bytes, Bytes>>& kv) {
  std::vector<PathEntry> out(kv.size());
  for (std::size_t i = 0; i < kv.size(); ++i) {
    out[i] = {key_path(cfg, kv[i].first), digest(cfg, kv[i].second)};
  }
  return out;
}

std::vector<PathEntry> hash_entries_parallel(const HashConfig& cfg,
                                             const std::vector<std::pair<Bytes, Bytes>>& kv) {
  std::vector<PathEntry> out(kv.size());
  const auto n = static_cast<std::int64_t>(kv.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out[i] = {key_path(cfg, kv[i].first), digest(cfg, kv[i].second)};
  }
  return out;
}

SparseTree build_tree_serial(const HashConfig& cfg, const std::vector<PathEntry>& entries) {
  SparseTree tree(cfg);
  for (const auto& e : entries) tree.insert_path(e.path, e.value);
  return tree;
}

SparseTree build_tree_parallel(const HashConfig& cfg, std::vector<PathEntry> entries) {
  SparseTree tree(cfg);
  const Digest& empty_leaf = tree.empties()[0];
  for (const auto& e : entries) {
    if (e.path.size() != cfg.path_height) throw std::invalid_argument("path length differs from tree height");
    if (e.value == empty_leaf) throw std::invalid_argument("empty-leaf digest cannot be stored");
  }
  // stable sort + keep last: same result as inserting in order
  std::stable_sort(entries.begin(), entries.end(), path_less);
  std::vector<PathEntry> unique;
  unique.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i + 1 < entries.size() && entries[i + 1].path == entries[i].path) continue;
    unique.push_back(std::move(entries[i]));
  }
  if (unique.empty()) return tree;

  const Builder builder{tree, unique, cfg.path_height};
  std::unique_ptr<TreeNode> root;
#pragma omp parallel
#pragma omp single
  root = builder.build(0, unique.size(), 0, true);
  tree.adopt(std::move(root), unique.size());
  return tree;
}

std::vector<PathProof> batch_rootpath_serial(const SparseTree& tree, const std::vector<PathBits>& paths) {
  std::vector<PathProof> out(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) out[i] = tree.rootpath_path(paths[i]);
  return out;
}

std::vector<PathProof> batch_rootpath_parallel(const SparseTree& tree, const std::vector<PathBits>& paths) {
  std::vector<PathProof> out(paths.size());
  const auto n = static_cast<std::int64_t>(paths.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i) out[i] = tree.rootpath_path(paths[i]);
  return out;
}

std::vector<VerifyOutcome> batch_verify_serial(const HashConfig& cfg, const Digest& root,
                                               const std::vector<PathBits>& paths,
                                               const std::vector<Digest>& leaves,
                                               const std::vector<PathProof>& proofs) {
  if (paths.size() != leaves.size() || paths.size() != proofs.size()) throw std::invalid_argument("size mismatch");
  std::vector<VerifyOutcome> out(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) out[i] = verify_path(cfg, root, paths[i], leaves[i], proofs[i]);
  return out;
}

std::vector<VerifyOutcome> batch_verify_parallel(const HashConfig& cfg, const Digest& root,
                                                 const std::vector<PathBits>& paths,
                                                 const std::vector<Digest>& leaves,
                                                 const std::vector<PathProof>& proofs) {
  if (paths.size() != leaves.size() || paths.size() != proofs.size()) throw std::invalid_argument("size mismatch");
  std::vector<VerifyOutcome> out(paths.size());
  const auto n = static_cast<std::int64_t>(paths.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = verify_path(cfg, root, paths[i], leaves[i], proofs[i]);
  return out;
}

}  // namespace kht::kernels
