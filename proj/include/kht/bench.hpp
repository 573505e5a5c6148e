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
#include <string>
#include <vector>

#include "kht/hash.hpp"

namespace kht::bench {

/// One line of benchmark output.
struct Record {
  std::string profile;
  std::size_t n = 0;
  std::string metric;
  double value = 0;
  std::uint64_t seed = 0;

  /// {"profile":..,"n":..,"metric":..,"value":..,"seed":..}
  std::string json() const;
};

std::string profile_name(const HashConfig& cfg);

/// Deterministic distinct keys "k<seed>-<i>".
std::vector<Bytes> make_keys(std::size_t n, std::uint64_t seed);

/// Structural metrics for a tree over n random keys: node_count, node_ratio,
/// mean_leaf_depth, max_leaf_depth, mean_absent_traversal, proof_bytes.
/// Deterministic for a fixed seed.
std::vector<Record> structure_metrics(const HashConfig& cfg, std::size_t n, std::uint64_t seed);

/// Hash-block cost of keeping each credential current when one key is
/// added to n: keyed_update_blocks (tree insert), simple_recompute_blocks,
/// chain_recompute_blocks and forest_recompute_blocks (rebuild from all keys).
std::vector<Record> cost_metrics(const HashConfig& cfg, std::size_t n, std::uint64_t seed);

/// Mean wall-clock microseconds for insert, delete, rootpath and verify.
/// Reported, never asserted.
std::vector<Record> latency_metrics(const HashConfig& cfg, std::size_t n, std::uint64_t seed);

/// All of the above.
std::vector<Record> bench_suite(std::size_t n, const HashConfig& cfg, std::uint64_t seed);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace kht::bench
