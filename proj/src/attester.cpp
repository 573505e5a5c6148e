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

#include "kht/attester.hpp"

#include <stdexcept>

#include "kht/proof.hpp"

namespace kht {

const char* to_string(AttesterVerdict v) {
  switch (v) {
    case AttesterVerdict::Accept: return "Accept";
    case AttesterVerdict::Reject: return "Reject";
    case AttesterVerdict::Error: return "Error";
  }
  return "?";
}

Attester::Attester(const HashConfig& cfg) : cfg_(cfg), empties_(std::make_shared<const EmptyTable>(cfg)) {}

Bytes Attester::effective_key(ByteView x) const {
  if (x.empty()) return tau();
  return Bytes(x.begin(), x.end());
}

SparseTree Attester::key_tree(const KeySet& s) const {
  SparseTree tree(cfg_, empties_);
  const Bytes reserved = tau();
  for (const auto& key : s) {
    if (key == reserved) throw std::invalid_argument("key collides with the reserved key");
    const Bytes k = effective_key(key);
    if (!tree.insert(k, digest(cfg_, k))) throw std::invalid_argument("two members share a leaf path");
  }
  return tree;
}

Digest Attester::D(const KeySet& s) const { return key_tree(s).root_digest(); }

PathProof Attester::P(const KeySet& s, ByteView x) const { return key_tree(s).rootpath(effective_key(x)); }

AttesterVerdict Attester::V(ByteView x, const Digest& d, const PathProof& p) const {
  if (p.size() != cfg_.path_height) return AttesterVerdict::Error;
  const Bytes k = effective_key(x);
  const PathBits path = key_path(cfg_, k);
  const Digest member = digest(cfg_, k);
  const Digest& leaf = p.pairs[cfg_.path_height - 1][path[cfg_.path_height - 1]];
  if (leaf == member) {
    return verify_path(cfg_, d, path, member, p) ? AttesterVerdict::Accept : AttesterVerdict::Error;
  }
  if (leaf == (*empties_)[0]) {
    return verify_path(cfg_, d, path, leaf, p) ? AttesterVerdict::Reject : AttesterVerdict::Error;
  }
  return AttesterVerdict::Error;
}

std::optional<std::pair<Bytes, Bytes>> Attester::extract_collision(ByteView x, const Digest& d,
                                                                   const PathProof& accept,
                                                                   const PathProof& reject) const {
  if (V(x, d, accept) != AttesterVerdict::Accept || V(x, d, reject) != AttesterVerdict::Reject) {
    return std::nullopt;
  }
  for (std::size_t i = 0; i < cfg_.path_height; ++i) {
    if (accept.pairs[i] == reject.pairs[i]) continue;
    Bytes a = accept.pairs[i][0].bytes();
    append(a, accept.pairs[i][1].view());
    Bytes b = reject.pairs[i][0].bytes();
    append(b, reject.pairs[i][1].view());
    if (a != b && digest(cfg_, a) == digest(cfg_, b)) return std::make_pair(std::move(a), std::move(b));
    return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace kht
