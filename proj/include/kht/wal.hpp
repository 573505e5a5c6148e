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
#include <filesystem>
#include <functional>
#include <stdexcept>

#include "kht/bytes.hpp"

namespace kht {

class StorageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WalRecord {
  enum class Kind : std::uint8_t { Put = 0x01, Delete = 0x02 };
  Kind op = Kind::Put;
  std::uint64_t seq = 0;
  Bytes key;
  Bytes value;  // Put only

  friend bool operator==(const WalRecord&, const WalRecord&) = default;
};

/// op(1) || seq(8) || keylen(4) || key || [vallen(4) || value] || crc32(4)
Bytes encode_wal_record(const WalRecord& rec);

/// Append-only replay log. Opening replays every intact record and truncates
/// a torn or corrupt tail, so a crash mid-append loses at most that record.
class WriteAheadLog {
 public:
  using Visitor = std::function<void(const WalRecord&)>;

  WriteAheadLog(std::filesystem::path path, bool sync, const Visitor& replay);
  ~WriteAheadLog();
  WriteAheadLog(const WriteAheadLog&) = delete;
  WriteAheadLog& operator=(const WriteAheadLog&) = delete;

  /// Durable before return (fdatasync when `sync`). Throws StorageError; the
  /// file is rolled back to its previous length on failure.
  void append(const WalRecord& rec);

  std::size_t records() const { return records_; }
  const std::filesystem::path& path() const { return path_; }

  /// Test hook: make the next appends fail as if the disk refused them.
  void fail_writes(bool on) { fail_writes_ = on; }

 private:
  std::filesystem::path path_;
  int fd_ = -1;
  bool sync_;
  bool fail_writes_ = false;
  std::size_t records_ = 0;
  std::uint64_t size_ = 0;
};

}  // namespace kht
