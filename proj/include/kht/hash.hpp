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

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "kht/bytes.hpp"

namespace kht {

inline constexpr std::size_t kMaxDigestLen = 32;

/// Hash profile: which hash, its output length L and the tree height H.
///
/// Every profile hashes with SHA-256; shorter profiles truncate the output.
/// The path of a key is the first H bits of its digest, MSB-first.
struct HashConfig {
  std::uint8_t alg_id = 0x01;
  std::size_t digest_len = 32;
  std::size_t path_height = 256;

  static HashConfig default_profile() { return {0x01, 32, 256}; }
  /// Same hash, 8-bit paths; small enough for the dense oracle.
  static HashConfig toy_profile() { return {0x7F, 32, 8}; }
  /// 20-byte digests, 160-bit paths (the SHA-1 sized layout).
  static HashConfig compat160_profile() { return {0x02, 20, 160}; }
  /// 16-bit digests. Collisions are cheap; used only to exercise collision extraction.
  static HashConfig weak16_profile() { return {0x7E, 2, 16}; }

  /// Profiles accepted on the wire; throws DecodeError for anything else.
  static HashConfig from_alg_id(std::uint8_t id);

  /// Throws std::invalid_argument unless 1 <= L <= 32 and 1 <= H <= 8L.
  void validate() const;

  std::size_t proof_bytes() const { return 2 * path_height * digest_len; }

  friend bool operator==(const HashConfig&, const HashConfig&) = default;
};

class Digest {
 public:
  Digest() = default;
  explicit Digest(ByteView bytes);

  std::size_t size() const { return len_; }
  const std::uint8_t* data() const { return bytes_.data(); }
  std::uint8_t* data() { return bytes_.data(); }
  ByteView view() const { return {bytes_.data(), len_}; }
  Bytes bytes() const { return Bytes(bytes_.begin(), bytes_.begin() + len_); }
  std::string hex() const { return to_hex(view()); }

  friend bool operator==(const Digest& a, const Digest& b) {
    return a.len_ == b.len_ && std::equal(a.bytes_.begin(), a.bytes_.begin() + a.len_, b.bytes_.begin());
  }
  friend bool operator<(const Digest& a, const Digest& b) {
    return std::lexicographical_compare(a.bytes_.begin(), a.bytes_.begin() + a.len_, b.bytes_.begin(),
                                        b.bytes_.begin() + b.len_);
  }

 private:
  std::array<std::uint8_t, kMaxDigestLen> bytes_{};
  std::size_t len_ = 0;
};

Digest digest(const HashConfig& cfg, ByteView data);
inline Digest digest(const HashConfig& cfg, std::string_view s) {
  return digest(cfg, ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}
/// digest(left || right) over the raw L-byte encodings.
Digest digest_pair(const HashConfig& cfg, const Digest& left, const Digest& right);

/// Per-thread count of hash invocations and SHA-256 compression blocks.
/// The block count is the deterministic cost model used by the benchmarks.
struct HashCounters {
  std::uint64_t calls = 0;
  std::uint64_t blocks = 0;
};
HashCounters& hash_counters();

/// Up to 256 bits, MSB-first: bit 0 is the top bit of byte 0.
class PathBits {
 public:
  PathBits() = default;
  PathBits(std::initializer_list<int> bits);
  static PathBits from_bools(const std::vector<bool>& bits);
  /// First `height` bits of `bytes`.
  static PathBits from_bytes(ByteView bytes, std::size_t height);

  std::size_t size() const { return len_; }
  bool operator[](std::size_t i) const { return (bytes_[i >> 3] >> (7 - (i & 7))) & 1U; }
  /// Bits [from, size()).
  PathBits suffix(std::size_t from) const;
  /// Integer value of the first d bits (d <= 16).
  std::uint32_t prefix_index(std::size_t d) const;
  /// Length of the common prefix with `other`, up to min(size()).
  std::size_t common_prefix(const PathBits& other) const;
  void set(std::size_t i, bool v);
  std::string str() const;

  friend bool operator==(const PathBits&, const PathBits&) = default;

 private:
  std::array<std::uint8_t, 32> bytes_{};
  std::size_t len_ = 0;
};

PathBits key_path(const HashConfig& cfg, ByteView key);
inline PathBits key_path(const HashConfig& cfg, std::string_view key) {
  return key_path(cfg, ByteView(reinterpret_cast<const std::uint8_t*>(key.data()), key.size()));
}

/// Roots of all-empty sub-trees: E[0] = h(""), E[i] = h(E[i-1] || E[i-1]).
class EmptyTable {
 public:
  EmptyTable() = default;
  explicit EmptyTable(const HashConfig& cfg);

  const Digest& operator[](std::size_t height) const { return table_.at(height); }
  std::size_t size() const { return table_.size(); }

 private:
  std::vector<Digest> table_;
};

inline EmptyTable build_empty_table(const HashConfig& cfg) { return EmptyTable(cfg); }

}  // namespace kht
