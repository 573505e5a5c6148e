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
#include <vector>

#include "kht/hash.hpp"

namespace kht {

/// Roots of the two children of one node on a path: [0] = left, [1] = right.
using HashPair = std::array<Digest, 2>;

/// Sibling pairs along a key's path. Index 0 holds the children of the tree
/// root, index H-1 the leaf layer. Always exactly H entries when well formed.
struct PathProof {
  std::vector<HashPair> pairs;

  std::size_t size() const { return pairs.size(); }
  friend bool operator==(const PathProof&, const PathProof&) = default;
};

}  // namespace kht
