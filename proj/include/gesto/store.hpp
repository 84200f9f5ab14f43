// Copyright 2026 The Gesto Authors.
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

#include <gesto/artwork.hpp>
#include <gesto/error.hpp>

#include "json.hpp"

#include <fcntl.h>
#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gesto {

inline std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  std::size_t done = 0;
  while (done < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - done, 1u << 30));
    crc = ::crc32(crc, bytes.data() + done, chunk);
    done += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

struct ArtworkRecord {
  ArtworkId artwork_id;
  std::uint64_t byte_len = 0;
  std::int64_t created_at = 0;
  std::string author;
  std::string title;
  std::uint32_t checksum = 0;

  bool operator==(const ArtworkRecord&) const = default;
};

struct ArtworkPage {
  std::vector<ArtworkRecord> items;
  std::optional<std::string> next;
};

struct StoreOptions {
  std::size_t write_chunk = 64 * 1024;
  /// Called at named points of the write path; a test hook throws from here
  /// to simulate a crash at that point.
  std::function<void(std::string_view point)> fault_hook;
};

namespace detail {

class Fd {
 public:
  explicit Fd(int fd) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  int get() const { return fd_; }

 private:
  int fd_;
};

inline void write_all(int fd, const std::uint8_t* data, std::size_t n, const std::string& what) {
  while (n > 0) {
    const ssize_t w = ::write(fd, data, n);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw Error(Errc::kIo, "write " + what + ": " + std::strerror(errno));
    }
    data += w;
    n -= static_cast<std::size_t>(w);
  }
}

inline void fsync_dir(const std::filesystem::path& dir) {
  Fd fd(::open(dir.c_str(), O_RDONLY | O_DIRECTORY));
  if (fd.get() >= 0) ::fsync(fd.get());
}

inline std::string hex_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned char c : s) {
    out.push_back(kHex[c >> 4]);
    out.push_back(kHex[c & 0xF]);
  }
  return out;
}

inline std::optional<std::string> hex_decode(std::string_view s) {
  if (s.size() % 2 != 0) return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
  };
  std::string out;
  for (std::size_t i = 0; i < s.size(); i += 2) {
    const int hi = nibble(s[i]), lo = nibble(s[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<char>(hi << 4 | lo));
  }
  return out;
}

inline nlohmann::json record_json(const ArtworkRecord& r) {
  return {{"op", "put"},        {"id", r.artwork_id.to_string()}, {"len", r.byte_len},
          {"crc", r.checksum},  {"created_at", r.created_at},     {"author", r.author},
          {"title", r.title}};
}

}  // namespace detail

/// One payload file per artwork under objects/, plus an append-only index
/// log. Payloads are written to a temp file, fsynced and renamed into place
/// before their index line is appended, so a record never points at a
/// partial payload. Startup replays the log, drops records whose payload is
/// missing or fails its CRC, deletes orphans and temp files, then rewrites
/// the log compacted.
class ArtworkStore {
 public:
  enum class PutResult { kCreated, kConflict };
  enum class RemoveResult { kRemoved, kNotFound };

  explicit ArtworkStore(std::filesystem::path dir, StoreOptions options = {})
      : dir_(std::move(dir)), options_(std::move(options)) {
    std::filesystem::create_directories(objects_dir());
    load();
  }

  ArtworkStore(const ArtworkStore&) = delete;
  ArtworkStore& operator=(const ArtworkStore&) = delete;

  /// Stores `payload` under record.artwork_id. byte_len and checksum are
  /// computed here. Returns kConflict when the id exists or is being written.
  PutResult put(ArtworkRecord record, std::span<const std::uint8_t> payload) {
    record.byte_len = payload.size();
    record.checksum = crc32_of(payload);
    const auto id = record.artwork_id;
    {
      std::unique_lock lock(mu_);
      if (records_.contains(id) || pending_.contains(id)) return PutResult::kConflict;
      pending_.insert(id);
    }
    struct PendingGuard {
      ArtworkStore& store;
      ArtworkId id;
      ~PendingGuard() {
        std::unique_lock lock(store.mu_);
        store.pending_.erase(id);
      }
    } guard{*this, id};

    write_payload(id, payload);
    fault("before-index");
    std::unique_lock lock(mu_);
    append_index(detail::record_json(record).dump());
    fault("after-index");
    records_.emplace(id, std::move(record));
    return PutResult::kCreated;
  }

  std::optional<ArtworkRecord> record(const ArtworkId& id) const {
    std::shared_lock lock(mu_);
    auto it = records_.find(id);
    if (it == records_.end()) return std::nullopt;
    return it->second;
  }

  /// Payload bytes, or nothing for an unknown (or concurrently deleted) id.
  std::optional<std::vector<std::uint8_t>> get(const ArtworkId& id) const {
    if (!record(id)) return std::nullopt;
    std::ifstream in(payload_path(id), std::ios::binary);
    if (!in) return std::nullopt;
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
  }

  RemoveResult remove(const ArtworkId& id) {
    std::unique_lock lock(mu_);
    if (!records_.contains(id)) return RemoveResult::kNotFound;
    append_index(nlohmann::json{{"op", "del"}, {"id", id.to_string()}}.dump());
    records_.erase(id);
    std::error_code ec;
    std::filesystem::remove(payload_path(id), ec);
    return RemoveResult::kRemoved;
  }

  std::size_t count() const {
    std::shared_lock lock(mu_);
    return records_.size();
  }

  /// Newest first, ties broken by ascending id. `after` is the opaque cursor
  /// from a previous page; throws kParameter when it does not parse.
  ArtworkPage list(const std::optional<std::string>& author, std::size_t limit,
                   const std::optional<std::string>& after) const {
    std::optional<std::pair<std::int64_t, ArtworkId>> start;
    if (after) start = parse_cursor(*after);

    std::vector<ArtworkRecord> all;
    {
      std::shared_lock lock(mu_);
      for (const auto& [id, rec] : records_) {
        if (!author || rec.author == *author) all.push_back(rec);
      }
    }
    auto before = [](const ArtworkRecord& a, const std::pair<std::int64_t, ArtworkId>& key) {
      if (a.created_at != key.first) return a.created_at > key.first;
      return a.artwork_id < key.second;
    };
    std::sort(all.begin(), all.end(), [&](const ArtworkRecord& a, const ArtworkRecord& b) {
      return before(a, {b.created_at, b.artwork_id});
    });
    auto it = all.begin();
    if (start) {
      it = std::find_if(all.begin(), all.end(), [&](const ArtworkRecord& r) {
        return !before(r, *start) && !(r.created_at == start->first && r.artwork_id == start->second);
      });
    }
    ArtworkPage page;
    while (it != all.end() && page.items.size() < limit) page.items.push_back(*it++);
    if (it != all.end() && !page.items.empty()) {
      page.next = make_cursor(page.items.back().created_at, page.items.back().artwork_id);
    }
    return page;
  }

  /// Ids whose payload no longer matches its record.
  std::vector<ArtworkId> scrub() const {
    std::vector<ArtworkRecord> all;
    {
      std::shared_lock lock(mu_);
      for (const auto& [id, rec] : records_) all.push_back(rec);
    }
    std::vector<ArtworkId> bad;
    for (const auto& rec : all) {
      if (!payload_matches(rec)) bad.push_back(rec.artwork_id);
    }
    return bad;
  }

  const std::filesystem::path& dir() const { return dir_; }

  std::filesystem::path payload_path(const ArtworkId& id) const {
    return objects_dir() / (id.to_string() + ".gstb");
  }

  static std::string make_cursor(std::int64_t created_at, const ArtworkId& id) {
    return detail::hex_encode(std::to_string(created_at) + ":" + id.to_string());
  }

 private:
  std::filesystem::path objects_dir() const { return dir_ / "objects"; }
  std::filesystem::path index_path() const { return dir_ / "index.log"; }

  void fault(std::string_view point) const {
    if (options_.fault_hook) options_.fault_hook(point);
  }

  static std::pair<std::int64_t, ArtworkId> parse_cursor(const std::string& cursor) {
    const auto text = detail::hex_decode(cursor);
    const auto colon = text ? text->find(':') : std::string::npos;
    if (colon == std::string::npos) throw Error(Errc::kParameter, "bad cursor");
    const auto id = ArtworkId::parse(std::string_view(*text).substr(colon + 1));
    std::int64_t created = 0;
    const auto head = text->substr(0, colon);
    auto [end, ec] = std::from_chars(head.data(), head.data() + head.size(), created);
    if (!id || ec != std::errc() || end != head.data() + head.size()) {
      throw Error(Errc::kParameter, "bad cursor");
    }
    return {created, *id};
  }

  void write_payload(const ArtworkId& id, std::span<const std::uint8_t> payload) {
    const auto final_path = payload_path(id);
    const auto tmp_path = objects_dir() / (id.to_string() + ".tmp");
    fault("open");
    {
      detail::Fd fd(::open(tmp_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644));
      if (fd.get() < 0) throw Error(Errc::kIo, "open " + tmp_path.string());
      const std::size_t chunk = std::max<std::size_t>(options_.write_chunk, 1);
      std::size_t index = 0;
      for (std::size_t done = 0; done < payload.size(); done += chunk, ++index) {
        fault("chunk-" + std::to_string(index));
        detail::write_all(fd.get(), payload.data() + done,
                          std::min(chunk, payload.size() - done), tmp_path.string());
      }
      fault("before-fsync");
      if (::fsync(fd.get()) != 0) throw Error(Errc::kIo, "fsync " + tmp_path.string());
    }
    fault("before-rename");
    std::filesystem::rename(tmp_path, final_path);
    detail::fsync_dir(objects_dir());
  }

  void append_index(const std::string& line) {
    detail::Fd fd(::open(index_path().c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644));
    if (fd.get() < 0) throw Error(Errc::kIo, "open index log");
    const std::string text = line + "\n";
    detail::write_all(fd.get(), reinterpret_cast<const std::uint8_t*>(text.data()), text.size(),
                      "index log");
    ::fsync(fd.get());
  }

  bool payload_matches(const ArtworkRecord& rec) const {
    std::ifstream in(payload_path(rec.artwork_id), std::ios::binary);
    if (!in) return false;
    const std::vector<std::uint8_t> bytes(std::istreambuf_iterator<char>(in), {});
    return bytes.size() == rec.byte_len && crc32_of(bytes) == rec.checksum;
  }

  void load() {
    std::map<ArtworkId, ArtworkRecord> replayed;
    std::ifstream in(index_path());
    std::string line;
    while (std::getline(in, line)) {
      // A torn final line from a crash mid-append is skipped.
      const auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object() || !j.contains("op") || !j.contains("id") ||
          !j["id"].is_string()) {
        continue;
      }
      const auto id = ArtworkId::parse(j["id"].get<std::string>());
      if (!id) continue;
      if (j["op"] == "del") {
        replayed.erase(*id);
        continue;
      }
      try {
        ArtworkRecord rec;
        rec.artwork_id = *id;
        rec.byte_len = j.at("len").get<std::uint64_t>();
        rec.checksum = j.at("crc").get<std::uint32_t>();
        rec.created_at = j.at("created_at").get<std::int64_t>();
        rec.author = j.at("author").get<std::string>();
        rec.title = j.at("title").get<std::string>();
        replayed[*id] = std::move(rec);
      } catch (const nlohmann::json::exception&) {
        continue;
      }
    }
    in.close();

    for (auto& [id, rec] : replayed) {
      if (payload_matches(rec)) records_.emplace(id, std::move(rec));
    }
    for (const auto& entry : std::filesystem::directory_iterator(objects_dir())) {
      const auto name = entry.path().filename().string();
      const auto stem = entry.path().stem().string();
      const auto id = ArtworkId::parse(stem);
      const bool live = entry.path().extension() == ".gstb" && id && records_.contains(*id);
      if (!live) std::filesystem::remove(entry.path());
    }

    const auto tmp = dir_ / "index.log.tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      for (const auto& [id, rec] : records_) out << detail::record_json(rec).dump() << '\n';
    }
    {
      detail::Fd fd(::open(tmp.c_str(), O_RDONLY));
      if (fd.get() >= 0) ::fsync(fd.get());
    }
    std::filesystem::rename(tmp, index_path());
    detail::fsync_dir(dir_);
  }

  std::filesystem::path dir_;
  StoreOptions options_;
  mutable std::shared_mutex mu_;
  std::map<ArtworkId, ArtworkRecord> records_;
  std::set<ArtworkId> pending_;
};

}  // namespace gesto
