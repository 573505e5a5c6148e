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

#include "kht/hash.hpp"

#include <sodium.h>

#include <stdexcept>

namespace kht {

namespace {

void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw std::runtime_error("libsodium initialisation failed");
}

}  // namespace

std::string to_hex(ByteView b) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(b.size() * 2);
  for (auto c : b) {
    out.push_back(kDigits[c >> 4]);
    out.push_back(kDigits[c & 0xF]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw DecodeError("odd-length hex string");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw DecodeError("invalid hex digit");
  };
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
  }
  return out;
}

HashConfig HashConfig::from_alg_id(std::uint8_t id) {
  for (const auto& cfg : {default_profile(), toy_profile(), compat160_profile(), weak16_profile()}) {
    if (cfg.alg_id == id) return cfg;
  }
  throw DecodeError("unknown hash profile id");
}

void HashConfig::validate() const {
  if (digest_len < 1 || digest_len > kMaxDigestLen) throw std::invalid_argument("digest length out of range");
  if (path_height < 1 || path_height > 8 * digest_len) throw std::invalid_argument("path height out of range");
}

Digest::Digest(ByteView bytes) : len_(bytes.size()) {
  if (bytes.size() > kMaxDigestLen) throw std::invalid_argument("digest longer than 32 bytes");
  std::copy(bytes.begin(), bytes.end(), bytes_.begin());
}

HashCounters& hash_counters() {
  thread_local HashCounters counters;
  return counters;
}

Digest digest(const HashConfig& cfg, ByteView data) {
  ensure_sodium();
  std::array<std::uint8_t, crypto_hash_sha256_BYTES> full{};
  crypto_hash_sha256(full.data(), data.data(), data.size());
  auto& c = hash_counters();
  ++c.calls;
  c.blocks += (data.size() + 9 + 63) / 64;
  return Digest(ByteView(full.data(), cfg.digest_len));
}

Digest digest_pair(const HashConfig& cfg, const Digest& left, const Digest& right) {
  std::array<std::uint8_t, 2 * kMaxDigestLen> buf{};
  std::copy(left.data(), left.data() + left.size(), buf.begin());
  std::copy(right.data(), right.data() + right.size(), buf.begin() + left.size());
  return digest(cfg, ByteView(buf.data(), left.size() + right.size()));
}

PathBits::PathBits(std::initializer_list<int> bits) {
  if (bits.size() > 256) throw std::invalid_argument("path longer than 256 bits");
  for (int b : bits) set(len_++, b != 0);
}

PathBits PathBits::from_bools(const std::vector<bool>& bits) {
  if (bits.size() > 256) throw std::invalid_argument("path longer than 256 bits");
  PathBits p;
  for (bool b : bits) p.set(p.len_++, b);
  return p;
}

PathBits PathBits::from_bytes(ByteView bytes, std::size_t height) {
  if (height > 8 * bytes.size() || height > 256) throw std::invalid_argument("path height exceeds input");
  PathBits p;
  p.len_ = height;
  std::copy(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>((height + 7) / 8), p.bytes_.begin());
  if (height % 8 != 0) p.bytes_[height / 8] &= static_cast<std::uint8_t>(0xFF << (8 - height % 8));
  return p;
}

void PathBits::set(std::size_t i, bool v) {
  const auto mask = static_cast<std::uint8_t>(1U << (7 - (i & 7)));
  if (v) {
    bytes_[i >> 3] |= mask;
  } else {
    bytes_[i >> 3] &= static_cast<std::uint8_t>(~mask);
  }
}

PathBits PathBits::suffix(std::size_t from) const {
  if (from > len_) throw std::out_of_range("suffix start beyond path");
  PathBits p;
  p.len_ = len_ - from;
  for (std::size_t i = 0; i < p.len_; ++i) p.set(i, (*this)[from + i]);
  return p;
}

std::uint32_t PathBits::prefix_index(std::size_t d) const {
  if (d > len_ || d > 16) throw std::out_of_range("prefix too long");
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < d; ++i) v = (v << 1) | static_cast<std::uint32_t>((*this)[i]);
  return v;
}

std::size_t PathBits::common_prefix(const PathBits& other) const {
  const std::size_t n = std::min(len_, other.len_);
  std::size_t i = 0;
  // whole bytes first
  while (i + 8 <= n && bytes_[i >> 3] == other.bytes_[i >> 3]) i += 8;
  while (i < n && (*this)[i] == other[i]) ++i;
  return i;
}

std::string PathBits::str() const {
  std::string s;
  s.reserve(len_);
  for (std::size_t i = 0; i < len_; ++i) s.push_back((*this)[i] ? '1' : '0');
  return s;
}

PathBits key_path(const HashConfig& cfg, ByteView key) {
  const Digest d = digest(cfg, key);
  return PathBits::from_bytes(d.view(), cfg.path_height);
}

EmptyTable::EmptyTable(const HashConfig& cfg) {
  cfg.validate();
  table_.reserve(cfg.path_height + 1);
  table_.push_back(digest(cfg, ByteView{}));
  for (std::size_t i = 1; i <= cfg.path_height; ++i) {
    table_.push_back(digest_pair(cfg, table_[i - 1], table_[i - 1]));
  }
}

}  // namespace kht
