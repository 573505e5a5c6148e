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

#include "kht/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "json.hpp"

#include "kht/credentials.hpp"
#include "kht/kernels.hpp"
#include "kht/proof.hpp"
#include "kht/sparse_tree.hpp"

namespace kht::bench {

namespace {

using Clock = std::chrono::steady_clock;

SparseTree build(const HashConfig& cfg, const std::vector<Bytes>& keys) {
  std::vector<std::pair<Bytes, Bytes>> kv;
  kv.reserve(keys.size());
  for (const auto& k : keys) kv.emplace_back(k, k);
  return kernels::build_tree_parallel(cfg, kernels::hash_entries_parallel(cfg, kv));
}

double mean(const std::vector<std::size_t>& v) {
  if (v.empty()) return 0;
  return static_cast<double>(std::accumulate(v.begin(), v.end(), std::size_t{0})) / static_cast<double>(v.size());
}

std::uint64_t blocks_since(std::uint64_t start) { return hash_counters().blocks - start; }

}  // namespace

std::string Record::json() const {
  nlohmann::json j{{"profile", profile}, {"n", n}, {"metric", metric}, {"value", value}, {"seed", seed}};
  return j.dump();
}

std::string profile_name(const HashConfig& cfg) {
  switch (cfg.alg_id) {
    case 0x01: return "default";
    case 0x7F: return "toy";
    case 0x02: return "compat160";
    case 0x7E: return "weak16";
    default: return "custom";
  }
}

std::vector<Bytes> make_keys(std::size_t n, std::uint64_t seed) {
  std::vector<Bytes> keys;
  keys.reserve(n);
  const std::string prefix = "k" + std::to_string(seed) + "-";
  for (std::size_t i = 0; i < n; ++i) keys.push_back(to_bytes(prefix + std::to_string(i)));
  return keys;
}

std::vector<Record> structure_metrics(const HashConfig& cfg, std::size_t n, std::uint64_t seed) {
  const auto keys = make_keys(n, seed);
  const SparseTree tree = build(cfg, keys);
  const std::string prof = profile_name(cfg);
  std::vector<Record> out;
  auto rec = [&](const char* metric, double v) { out.push_back({prof, n, metric, v, seed}); };

  const std::size_t nodes = tree.node_count();
  rec("node_count", static_cast<double>(nodes));
  rec("node_ratio", n == 0 ? 0.0 : static_cast<double>(nodes) / static_cast<double>(n));
  const auto depths = tree.leaf_depths();
  rec("mean_leaf_depth", mean(depths));
  rec("max_leaf_depth", depths.empty() ? 0.0 : static_cast<double>(*std::max_element(depths.begin(), depths.end())));

  std::vector<std::size_t> walks;
  const auto probes = make_keys(std::max<std::size_t>(n, 1024), seed ^ 0xA5A5A5A5ULL);
  for (const auto& p : probes) {
    const PathBits path = key_path(cfg, p);
    if (!tree.lookup_path(path)) walks.push_back(tree.traversal_length(path));
  }
  rec("mean_absent_traversal", mean(walks));
  rec("proof_bytes", static_cast<double>(encode_proof(tree.rootpath(probes.front())).size()));
  return out;
}

std::vector<Record> cost_metrics(const HashConfig& cfg, std::size_t n, std::uint64_t seed) {
  const auto keys = make_keys(n, seed);
  SparseTree tree = build(cfg, keys);
  const auto extra = make_keys(32, seed ^ 0x5EEDULL);
  const std::string prof = profile_name(cfg);
  std::vector<Record> out;

  std::uint64_t start = hash_counters().blocks;
  for (const auto& k : extra) tree.insert(k, digest(cfg, k));
  const double keyed = static_cast<double>(blocks_since(start)) / static_cast<double>(extra.size());
  out.push_back({prof, n, "keyed_update_blocks", keyed, seed});

  auto all = keys;
  all.push_back(extra.front());
  start = hash_counters().blocks;
  (void)simple_hash_credential(all, cfg);
  out.push_back({prof, n, "simple_recompute_blocks", static_cast<double>(blocks_since(start)), seed});

  start = hash_counters().blocks;
  Digest c = chain_genesis(cfg);
  for (const auto& k : all) c = chain_credential_extend(c, k, cfg);
  out.push_back({prof, n, "chain_recompute_blocks", static_cast<double>(blocks_since(start)), seed});

  start = hash_counters().blocks;
  ForestCredential f;
  for (const auto& k : all) f = forest_append(std::move(f), k, cfg);
  out.push_back({prof, n, "forest_recompute_blocks", static_cast<double>(blocks_since(start)), seed});
  return out;
}

std::vector<Record> latency_metrics(const HashConfig& cfg, std::size_t n, std::uint64_t seed) {
  const auto keys = make_keys(n, seed);
  SparseTree tree = build(cfg, keys);
  const auto extra = make_keys(64, seed ^ 0x1A7EULL);
  const std::string prof = profile_name(cfg);
  std::vector<Record> out;
  auto per_op = [&](Clock::time_point t0) {
    return std::chrono::duration<double, std::micro>(Clock::now() - t0).count() / static_cast<double>(extra.size());
  };

  auto t0 = Clock::now();
  for (const auto& k : extra) tree.insert(k, digest(cfg, k));
  out.push_back({prof, n, "latency_insert_us", per_op(t0), seed});

  std::vector<PathProof> proofs;
  t0 = Clock::now();
  for (const auto& k : extra) proofs.push_back(tree.rootpath(k));
  out.push_back({prof, n, "latency_rootpath_us", per_op(t0), seed});

  const Digest root = tree.root_digest();
  t0 = Clock::now();
  for (std::size_t i = 0; i < extra.size(); ++i) {
    (void)verify_path(cfg, root, key_path(cfg, extra[i]), digest(cfg, extra[i]), proofs[i]);
  }
  out.push_back({prof, n, "latency_verify_us", per_op(t0), seed});

  t0 = Clock::now();
  for (const auto& k : extra) tree.erase(k);
  out.push_back({prof, n, "latency_delete_us", per_op(t0), seed});
  return out;
}

std::vector<Record> bench_suite(std::size_t n, const HashConfig& cfg, std::uint64_t seed) {
  auto out = structure_metrics(cfg, n, seed);
  for (auto&& r : cost_metrics(cfg, n, seed)) out.push_back(std::move(r));
  for (auto&& r : latency_metrics(cfg, n, seed)) out.push_back(std::move(r));
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("need at least two points");
  const auto m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace kht::bench
