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

#include <vector>

#include "kht/hash.hpp"
#include "kht/proof.hpp"
#include "kht/sparse_tree.hpp"

namespace kht::kernels {

// Data-parallel bulk operations. Every *_parallel kernel has a *_serial
// reference with identical results; tests hold them equal and the benchmark
// target compares their speed. Parallel variants use OpenMP and fall back to
// one thread when it is unavailable.

struct PathEntry {
  PathBits path;
  Digest value;
};

/// Paths and leaf digests for (key, value) pairs: path = key_path(key),
/// leaf = digest(value).
std::vector<PathEntry> hash_entries_serial(const HashConfig& cfg, const std::vector<std::pair<Bytes, Bytes>>& kv);
std::vector<PathEntry> hash_entries_parallel(const HashConfig& cfg,
                                             const std::vector<std::pair<Bytes, Bytes>>& kv);

/// Reference: one insert per entry, in order. Later entries for the same
/// path replace earlier ones.
SparseTree build_tree_serial(const HashConfig& cfg, const std::vector<PathEntry>& entries);
/// Sorts by path, keeps the last entry per path, and builds the canonical
/// node structure top-down, forking OpenMP tasks for the two halves of each
/// split near the top of the tree.
SparseTree build_tree_parallel(const HashConfig& cfg, std::vector<PathEntry> entries);

std::vector<PathProof> batch_rootpath_serial(const SparseTree& tree, const std::vector<PathBits>& paths);
std::vector<PathProof> batch_rootpath_parallel(const SparseTree& tree, const std::vector<PathBits>& paths);

/// Verifies proofs[i] for paths[i] with leaf-layer element leaves[i].
std::vector<VerifyOutcome> batch_verify_serial(const HashConfig& cfg, const Digest& root,
                                               const std::vector<PathBits>& paths,
                                               const std::vector<Digest>& leaves,
                                               const std::vector<PathProof>& proofs);
std::vector<VerifyOutcome> batch_verify_parallel(const HashConfig& cfg, const Digest& root,
                                                 const std::vector<PathBits>& paths,
                                                 const std::vector<Digest>& leaves,
                                                 const std::vector<PathProof>& proofs);

int max_threads();

}  // namespace kht::kernels
