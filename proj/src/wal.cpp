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

#include "kht/wal.hpp"

#include <fcntl.h>
#include <unistd.h>
#include <zlib.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <iterator>

namespace kht {

namespace {

std::uint32_t crc(ByteView b) {
  return static_cast<std::uint32_t>(crc32(0L, b.data(), static_cast<uInt>(b.size())));
}

std::string sys_error(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

}  // namespace

Bytes encode_wal_record(const WalRecord& rec) {
  Bytes out;
  out.push_back(static_cast<std::uint8_t>(rec.op));
  put_be<std::uint64_t>(out, rec.seq);
  put_be<std::uint32_t>(out, static_cast<std::uint32_t>(rec.key.size()));
  append(out, rec.key);
  if (rec.op == WalRecord::Kind::Put) {
    put_be<std::uint32_t>(out, static_cast<std::uint32_t>(rec.value.size()));
    append(out, rec.value);
  }
  put_be<std::uint32_t>(out, crc(out));
  return out;
}

WriteAheadLog::WriteAheadLog(std::filesystem::path path, bool sync, const Visitor& replay)
    : path_(std::move(path)), sync_(sync) {
  Bytes data;
  {
    std::ifstream in(path_, std::ios::binary);
    if (in) data.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  std::size_t good = 0;
  while (good < data.size()) {
    try {
      ByteReader r(ByteView(data).subspan(good));
      WalRecord rec;
      const auto op = r.get_be<std::uint8_t>();
      if (op != 0x01 && op != 0x02) break;
      rec.op = static_cast<WalRecord::Kind>(op);
      rec.seq = r.get_be<std::uint64_t>();
      const auto key = r.take(r.get_be<std::uint32_t>());
      rec.key.assign(key.begin(), key.end());
      if (rec.op == WalRecord::Kind::Put) {
        const auto value = r.take(r.get_be<std::uint32_t>());
        rec.value.assign(value.begin(), value.end());
      }
      const std::size_t body = data.size() - good - r.remaining();
      const auto stored = r.get_be<std::uint32_t>();
      if (stored != crc(ByteView(data).subspan(good, body))) break;
      replay(rec);
      good += body + 4;
      ++records_;
    } catch (const DecodeError&) {
      break;  // torn tail
    }
  }

  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw StorageError(sys_error("open wal"));
  if (good != data.size() && ::ftruncate(fd_, static_cast<off_t>(good)) != 0) {
    throw StorageError(sys_error("truncate wal"));
  }
  size_ = good;
  if (::lseek(fd_, static_cast<off_t>(size_), SEEK_SET) < 0) throw StorageError(sys_error("seek wal"));
}

WriteAheadLog::~WriteAheadLog() {
  if (fd_ >= 0) ::close(fd_);
}

void WriteAheadLog::append(const WalRecord& rec) {
  if (fail_writes_) throw StorageError("wal write refused (injected)");
  const Bytes buf = encode_wal_record(rec);
  std::size_t done = 0;
  while (done < buf.size()) {
    const ssize_t n = ::write(fd_, buf.data() + done, buf.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      const std::string err = sys_error("append wal");
      (void)::ftruncate(fd_, static_cast<off_t>(size_));
      (void)::lseek(fd_, static_cast<off_t>(size_), SEEK_SET);
      throw StorageError(err);
    }
    done += static_cast<std::size_t>(n);
  }
  if (sync_ && ::fdatasync(fd_) != 0) {
    const std::string err = sys_error("sync wal");
    (void)::ftruncate(fd_, static_cast<off_t>(size_));
    (void)::lseek(fd_, static_cast<off_t>(size_), SEEK_SET);
    throw StorageError(err);
  }
  size_ += buf.size();
  ++records_;
}

}  // namespace kht
