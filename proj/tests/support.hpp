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

// Helpers shared by the unit tests: key generators and random workloads.

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "kht/hash.hpp"

namespace kht::testing {

/// Keys "<tag><i>" whose leaf paths are pairwise distinct under `cfg`.
inline std::vector<Bytes> distinct_path_keys(const HashConfig& cfg, std::size_t n, const std::string& tag) {
  std::vector<Bytes> out;
  std::set<std::string> paths;
  for (std::size_t i = 0; out.size() < n; ++i) {
    Bytes k = to_bytes(tag + std::to_string(i));
    if (paths.insert(key_path(cfg, k).str()).second) out.push_back(std::move(k));
  }
  return out;
}

struct Step {
  bool insert = true;
  Bytes key;
  Digest value;
};

/// Random insert/delete sequence over a pool of keys with distinct paths.
/// Deletes only target keys currently present.
inline std::vector<Step> random_workload(const HashConfig& cfg, const std::vector<Bytes>& pool, std::size_t steps,
                                         std::mt19937_64& rng) {
  std::vector<Step> out;
  std::set<Bytes> present;
  for (std::size_t s = 0; s < steps; ++s) {
    const bool del = !present.empty() && rng() % 3 == 0;
    if (del) {
      auto it = present.begin();
      std::advance(it, static_cast<long>(rng() % present.size()));
      out.push_back({false, *it, {}});
      present.erase(it);
    } else {
      const Bytes& k = pool[rng() % pool.size()];
      out.push_back({true, k, digest(cfg, "value-" + std::to_string(rng()))});
      present.insert(k);
    }
  }
  return out;
}

}  // namespace kht::testing
