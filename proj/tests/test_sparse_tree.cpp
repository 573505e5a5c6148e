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

#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "kht/dense_oracle.hpp"
#include "kht/proof.hpp"
#include "kht/sparse_tree.hpp"
#include "support.hpp"

using namespace kht;
using kht::testing::distinct_path_keys;

namespace {

const HashConfig kToy = HashConfig::toy_profile();
const HashConfig kDefault = HashConfig::default_profile();

// Frozen from an independent Python model of the dense height-8 tree.
constexpr const char* kRootAlpha = "4e932fc7a34757a485245114bec9a2151de4e309bccaeb13769de25380acc76d";
constexpr const char* kRootThree = "de18326001fa152fa929e25c69e2bec4e21c246d3ee67ab8c63326daddfd8baf";

void check_chaining(const HashConfig& cfg, const SparseTree& t, const PathBits& path, const PathProof& p) {
  REQUIRE(p.size() == t.height());
  CHECK(digest_pair(cfg, p.pairs[0][0], p.pairs[0][1]) == t.root_digest());
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    REQUIRE(p.pairs[i][path[i]] == digest_pair(cfg, p.pairs[i + 1][0], p.pairs[i + 1][1]));
  }
}

PathBits ones_then_zeros(std::size_t ones, std::size_t height) {
  std::vector<bool> b(height, false);
  for (std::size_t i = 0; i < ones && i < height; ++i) b[i] = true;
  return PathBits::from_bools(b);
}

}  // namespace

TEST_CASE("new tree") {
  const SparseTree toy(kToy);
  CHECK(toy.root_digest() == EmptyTable(kToy)[8]);
  CHECK(toy.node_count() == 0);
  CHECK(toy.size() == 0);
  CHECK_FALSE(toy.lookup_digest(to_bytes("x")).has_value());
  CHECK(new_tree(kDefault).size() == 0);
  CHECK(new_tree(kDefault).root_digest() == EmptyTable(kDefault)[256]);
}

TEST_CASE("subtree_hash_single unfolds") {
  const EmptyTable e(kToy);
  const Digest v = digest(kToy, "v");
  CHECK(subtree_hash_single(kToy, e, PathBits{}, v) == v);
  CHECK(subtree_hash_single(kToy, e, PathBits{0}, v) == digest_pair(kToy, v, e[0]));
  CHECK(subtree_hash_single(kToy, e, PathBits{1, 1}, v) == digest_pair(kToy, e[1], digest_pair(kToy, e[0], v)));
  CHECK(subtree_hash_single(kToy, e, PathBits{0, 1}, v) == digest_pair(kToy, digest_pair(kToy, e[0], v), e[1]));
}

TEST_CASE("roots match frozen dense values") {
  SparseTree t(kToy);
  t.insert(to_bytes("alpha"), digest(kToy, "v1"));
  CHECK(t.root_digest().hex() == kRootAlpha);
  t.insert(to_bytes("beta"), digest(kToy, "v2"));
  t.insert(to_bytes("gamma"), digest(kToy, "v3"));
  CHECK(t.root_digest().hex() == kRootThree);
}

TEST_CASE("insert into empty tree makes one LEAF node") {
  SparseTree t(kToy);
  const Digest v = digest(kToy, "v1");
  CHECK(t.insert(to_bytes("alpha"), v));
  CHECK(t.node_count() == 1);
  CHECK(t.root_node()->is_leaf());
  CHECK(t.root_digest() == subtree_hash_single(kToy, t.empties(), key_path(kToy, "alpha"), v));
  CHECK(t.root_digest() == oracle::dense_root({{to_bytes("alpha"), v}}, kToy));
  CHECK(t.lookup_digest(to_bytes("alpha")) == v);
}

TEST_CASE("insert is idempotent and updates in place") {
  SparseTree t(kToy);
  t.insert(to_bytes("alpha"), digest(kToy, "v1"));
  const Digest r = t.root_digest();
  CHECK_FALSE(t.insert(to_bytes("alpha"), digest(kToy, "v1")));
  CHECK(t.root_digest() == r);
  CHECK_FALSE(t.insert(to_bytes("alpha"), digest(kToy, "v2")));
  CHECK(t.size() == 1);
  CHECK(t.root_digest() != r);
  CHECK(t.lookup_digest(to_bytes("alpha")) == digest(kToy, "v2"));
}

TEST_CASE("insert refuses the empty-leaf digest and foreign lengths") {
  SparseTree t(kToy);
  CHECK_THROWS_AS(t.insert(to_bytes("a"), digest(kToy, "")), std::invalid_argument);
  CHECK_THROWS_AS(t.insert(to_bytes("a"), digest(HashConfig::compat160_profile(), "x")), std::invalid_argument);
  CHECK(t.size() == 0);
}

TEST_CASE("keys sharing a 3-bit prefix fork at depth 3") {
  // alpha -> 10001110, q12 -> 10010001
  REQUIRE(key_path(kToy, "alpha").common_prefix(key_path(kToy, "q12")) == 3);
  SparseTree t(kToy);
  t.insert(to_bytes("alpha"), digest(kToy, "a"));
  t.insert(to_bytes("q12"), digest(kToy, "q"));
  const TreeNode* root = t.root_node();
  REQUIRE_FALSE(root->is_leaf());
  CHECK(root->split == 3);
  CHECK(root->child[0]->is_leaf());
  CHECK(root->child[1]->is_leaf());
  CHECK(t.node_count() == 3);
  CHECK(t.leaf_depths() == std::vector<std::size_t>{4, 4});
  CHECK(t.root_digest() ==
        oracle::dense_root({{to_bytes("alpha"), digest(kToy, "a")}, {to_bytes("q12"), digest(kToy, "q")}}, kToy));
  CHECK_NOTHROW(t.check_invariants());
}

TEST_CASE("delete restores the previous root and collapses stalks") {
  SparseTree t(kToy);
  t.insert(to_bytes("alpha"), digest(kToy, "a"));
  const Digest one = t.root_digest();
  t.insert(to_bytes("q12"), digest(kToy, "q"));
  t.erase(to_bytes("q12"));
  CHECK(t.root_digest() == one);
  CHECK(t.node_count() == 1);
  CHECK(t.root_node()->is_leaf());
  t.erase(to_bytes("alpha"));
  CHECK(t.root_digest() == EmptyTable(kToy)[8]);
  CHECK(t.node_count() == 0);
}

TEST_CASE("delete of an absent key leaves the tree unchanged") {
  SparseTree t(kToy);
  CHECK_THROWS_AS(t.erase(to_bytes("alpha")), NoSuchEntry);
  t.insert(to_bytes("alpha"), digest(kToy, "a"));
  t.insert(to_bytes("q12"), digest(kToy, "q"));
  const Digest r = t.root_digest();
  const auto keys = distinct_path_keys(kToy, 40, "absent");
  for (const auto& k : keys) {
    if (t.lookup_digest(k)) continue;
    const PathBits p = key_path(kToy, k);
    if (p == key_path(kToy, "alpha") || p == key_path(kToy, "q12")) continue;
    CHECK_THROWS_AS(t.erase(k), NoSuchEntry);
    REQUIRE(t.root_digest() == r);
    REQUIRE(t.node_count() == 3);
    REQUIRE(t.size() == 2);
  }
}

TEST_CASE("deep stalk at full height") {
  SparseTree t(kDefault);
  const Digest a = digest(kDefault, "a");
  const Digest b = digest(kDefault, "b");
  PathBits p = ones_then_zeros(0, 256);
  PathBits q = p;
  q.set(255, true);
  t.insert_path(p, a);
  const Digest single = t.root_digest();
  t.insert_path(q, b);
  CHECK(t.node_count() == 3);
  CHECK(t.leaf_depths() == std::vector<std::size_t>{256, 256});
  CHECK_NOTHROW(t.check_invariants());
  check_chaining(kDefault, t, p, t.rootpath_path(p));
  check_chaining(kDefault, t, q, t.rootpath_path(q));
  // leaf pair holds both values
  CHECK(t.rootpath_path(p).pairs[255] == HashPair{a, b});
  t.erase_path(q);
  CHECK(t.root_digest() == single);
}

TEST_CASE("nested stalks to full depth do not exhaust the stack") {
  SparseTree t(kDefault);
  for (std::size_t i = 0; i <= 256; ++i) t.insert_path(ones_then_zeros(i, 256), digest(kDefault, std::to_string(i)));
  CHECK(t.size() == 257);
  CHECK(t.node_count() == 2 * 257 - 1);
  CHECK_NOTHROW(t.check_invariants());
  for (std::size_t i = 0; i <= 256; i += 32) {
    const PathBits p = ones_then_zeros(i, 256);
    check_chaining(kDefault, t, p, t.rootpath_path(p));
  }
  for (std::size_t i = 0; i <= 256; ++i) t.erase_path(ones_then_zeros(i, 256));
  CHECK(t.root_digest() == EmptyTable(kDefault)[256]);
}

TEST_CASE("rootpath on the empty tree is all empty pairs") {
  const SparseTree t(kToy);
  const EmptyTable e(kToy);
  const PathProof p = t.rootpath(to_bytes("anything"));
  REQUIRE(p.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) CHECK(p.pairs[i] == HashPair{e[7 - i], e[7 - i]});
}

TEST_CASE("rootpath of a singleton's own key") {
  SparseTree t(kToy);
  const EmptyTable e(kToy);
  const Digest v = digest(kToy, "v1");
  t.insert(to_bytes("alpha"), v);
  const PathBits path = key_path(kToy, "alpha");
  const PathProof p = t.rootpath(to_bytes("alpha"));
  check_chaining(kToy, t, path, p);
  for (std::size_t i = 0; i < 8; ++i) CHECK(p.pairs[i][!path[i]] == e[7 - i]);
  CHECK(p.pairs[7][path[7]] == v);
  CHECK(p == oracle::dense_proof({{to_bytes("alpha"), v}}, to_bytes("alpha"), kToy));
}

TEST_CASE("rootpath for keys diverging from a singleton after j bits") {
  SparseTree t(kToy);
  const EmptyTable e(kToy);
  const Digest v = digest(kToy, "v1");
  t.insert(to_bytes("alpha"), v);
  const PathBits own = key_path(kToy, "alpha");
  std::set<std::size_t> seen;
  for (int i = 0; seen.size() < 8 && i < 100000; ++i) {
    const Bytes k = to_bytes("d" + std::to_string(i));
    const PathBits q = key_path(kToy, k);
    const std::size_t j = own.common_prefix(q);
    if (j == 8 || !seen.insert(j).second) continue;
    const PathProof p = t.rootpath(k);
    CHECK(p == oracle::dense_proof({{to_bytes("alpha"), v}}, k, kToy));
    // pairs 0..j carry the entry's chain, below that both sides are empty
    for (std::size_t lvl = 0; lvl <= j; ++lvl) CHECK(p.pairs[lvl][own[lvl]] != e[7 - lvl]);
    for (std::size_t lvl = j + 1; lvl < 8; ++lvl) CHECK(p.pairs[lvl] == HashPair{e[7 - lvl], e[7 - lvl]});
    CHECK(p.pairs[7][q[7]] == e[0]);
  }
  CHECK(seen.size() == 8);
}

TEST_CASE("oracle equivalence, node bound and proof chaining over random workloads") {
  for (const std::size_t h : {8, 12}) {
    const HashConfig cfg{0x7F, 32, h};
    const auto pool = distinct_path_keys(cfg, 120, "w");
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
      std::mt19937_64 rng(seed);
      SparseTree t(cfg);
      oracle::DenseTree dense(cfg);
      for (const auto& step : testing::random_workload(cfg, pool, 200, rng)) {
        if (step.insert) {
          t.insert(step.key, step.value);
          dense.set(step.key, step.value);
        } else {
          t.erase(step.key);
          dense.clear(step.key);
        }
        REQUIRE(t.root_digest() == dense.root());
        if (t.size() > 0) REQUIRE(t.node_count() < 2 * t.size());
        const Bytes& probe = pool[rng() % pool.size()];
        const PathProof p = t.rootpath(probe);
        REQUIRE(p == dense.proof(probe));
        check_chaining(cfg, t, key_path(cfg, probe), p);
      }
      CHECK_NOTHROW(t.check_invariants());
    }
  }
}

TEST_CASE("root depends only on the final key map") {
  for (const auto& cfg : {kToy, kDefault}) {
    const auto keys = distinct_path_keys(cfg, 60, "perm");
    SparseTree ref(cfg);
    for (const auto& k : keys) ref.insert(k, digest(cfg, k));
    std::mt19937_64 rng(9);
    for (int round = 0; round < 10; ++round) {
      auto order = keys;
      std::shuffle(order.begin(), order.end(), rng);
      SparseTree t(cfg);
      // detours: insert a junk value first, and some extra keys to delete again
      for (std::size_t i = 0; i < order.size(); ++i) {
        if (i % 4 == 0) t.insert(order[i], digest(cfg, "junk"));
        t.insert(order[i], digest(cfg, order[i]));
      }
      REQUIRE(t.root_digest() == ref.root_digest());
      REQUIRE(t.node_count() == ref.node_count());
    }
  }
}

TEST_CASE("deleting everything in random order returns to E[H]") {
  const auto keys = distinct_path_keys(kDefault, 300, "del");
  SparseTree t(kDefault);
  for (const auto& k : keys) t.insert(k, digest(kDefault, k));
  auto order = keys;
  std::mt19937_64 rng(4);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 0; i < order.size(); ++i) {
    t.erase(order[i]);
    if (i % 37 == 0) REQUIRE_NOTHROW(t.check_invariants());
    if (t.size() > 0) REQUIRE(t.node_count() == 2 * t.size() - 1);
  }
  CHECK(t.root_digest() == EmptyTable(kDefault)[256]);
}

TEST_CASE("copies are deep") {
  SparseTree a(kToy);
  a.insert(to_bytes("alpha"), digest(kToy, "a"));
  SparseTree b = a;
  b.insert(to_bytes("q12"), digest(kToy, "q"));
  CHECK(a.size() == 1);
  CHECK(a.root_digest().hex() != b.root_digest().hex());
  CHECK_NOTHROW(a.check_invariants());
  CHECK_NOTHROW(b.check_invariants());
}

TEST_CASE("prefix sub-trees") {
  const auto empties = std::make_shared<const EmptyTable>(kToy);
  SparseTree shard(kToy, empties, PathBits{1, 0});
  CHECK(shard.height() == 6);
  CHECK(shard.root_digest() == (*empties)[6]);
  const auto keys = distinct_path_keys(kToy, 200, "s");
  std::map<Bytes, Digest> inside;
  for (const auto& k : keys) {
    const PathBits p = key_path(kToy, k);
    if (p[0] && !p[1]) {
      shard.insert(k, digest(kToy, k));
      inside[k] = digest(kToy, k);
    } else {
      CHECK_THROWS_AS(shard.insert(k, digest(kToy, k)), std::invalid_argument);
    }
  }
  REQUIRE(!inside.empty());
  CHECK_NOTHROW(shard.check_invariants());
  // prefix 10: left child (heap 5) of the root's right child (heap 2)
  oracle::DenseTree dense(kToy);
  for (const auto& [k, v] : inside) dense.set(k, v);
  CHECK(shard.root_digest() == dense.node(2 * 2 + 1));
  const PathProof p = shard.rootpath(inside.begin()->first);
  CHECK(p.size() == 6);
}

TEST_CASE("invariant audit catches corruption") {
  SparseTree t(kToy);
  t.insert(to_bytes("alpha"), digest(kToy, "a"));
  t.insert(to_bytes("q12"), digest(kToy, "q"));
  auto* root = const_cast<TreeNode*>(t.root_node());
  root->child[0]->hash = digest(kToy, "bogus");
  CHECK_THROWS_AS(t.check_invariants(), std::logic_error);
}
