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

#include <gesto/store.hpp>

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <fstream>
#include <random>
#include <thread>

namespace gesto {
namespace {

using testing::TempDir;
using Bytes = std::vector<std::uint8_t>;

struct Crash : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Bytes payload_of(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Bytes b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(gen());
  return b;
}

ArtworkRecord record_for(std::uint64_t n, std::int64_t created_at = 0, std::string author = "ana") {
  ArtworkRecord r;
  r.artwork_id = ArtworkId::from_words(0xA0, n);
  r.created_at = created_at;
  r.author = std::move(author);
  r.title = "piece " + std::to_string(n);
  return r;
}

TEST(Crc32, KnownVector) {
  const std::string s = "123456789";
  EXPECT_EQ(crc32_of({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()}), 0xCBF43926u);
  EXPECT_EQ(crc32_of({}), 0u);
}

TEST(Store, PutGetAndConflict) {
  TempDir dir;
  ArtworkStore store(dir.path());
  const auto bytes = payload_of(1000, 1);
  EXPECT_EQ(store.put(record_for(1), bytes), ArtworkStore::PutResult::kCreated);
  EXPECT_EQ(store.put(record_for(1), payload_of(10, 2)), ArtworkStore::PutResult::kConflict);
  EXPECT_EQ(store.get(record_for(1).artwork_id), bytes);
  const auto rec = store.record(record_for(1).artwork_id);
  ASSERT_TRUE(rec);
  EXPECT_EQ(rec->byte_len, 1000u);
  EXPECT_EQ(rec->checksum, crc32_of(bytes));
  EXPECT_FALSE(store.get(record_for(2).artwork_id));
  EXPECT_EQ(store.count(), 1u);
}

TEST(Store, SurvivesRestart) {
  TempDir dir;
  std::vector<Bytes> payloads;
  {
    ArtworkStore store(dir.path());
    for (std::uint64_t i = 0; i < 20; ++i) {
      payloads.push_back(payload_of(100 + 37 * i, i));
      store.put(record_for(i, static_cast<std::int64_t>(i)), payloads.back());
    }
    store.remove(record_for(3).artwork_id);
  }
  ArtworkStore reopened(dir.path());
  EXPECT_EQ(reopened.count(), 19u);
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto got = reopened.get(record_for(i).artwork_id);
    if (i == 3) {
      EXPECT_FALSE(got);
    } else {
      EXPECT_EQ(got, payloads[i]);
      EXPECT_EQ(reopened.record(record_for(i).artwork_id)->created_at, static_cast<std::int64_t>(i));
    }
  }
}

TEST(Store, RemoveThenPutAgain) {
  TempDir dir;
  ArtworkStore store(dir.path());
  const auto id = record_for(9).artwork_id;
  EXPECT_EQ(store.remove(id), ArtworkStore::RemoveResult::kNotFound);
  store.put(record_for(9), payload_of(10, 1));
  EXPECT_EQ(store.remove(id), ArtworkStore::RemoveResult::kRemoved);
  EXPECT_FALSE(std::filesystem::exists(store.payload_path(id)));
  EXPECT_EQ(store.put(record_for(9), payload_of(20, 2)), ArtworkStore::PutResult::kCreated);
  EXPECT_EQ(store.get(id), payload_of(20, 2));
}

TEST(Store, EveryCrashPointLeavesNothingOrEverything) {
  const auto bytes = payload_of(240, 7);
  StoreOptions probe;
  probe.write_chunk = 16;
  std::vector<std::string> points;
  probe.fault_hook = [&](std::string_view p) { points.emplace_back(p); };
  {
    TempDir dir;
    ArtworkStore store(dir.path(), probe);
    store.put(record_for(1), bytes);
  }
  ASSERT_EQ(points.size(), 20u);

  for (const auto& point : points) {
    TempDir dir;
    {
      ArtworkStore store(dir.path());
      store.put(record_for(2), payload_of(50, 2));  // an earlier, committed artwork
    }
    StoreOptions options;
    options.write_chunk = 16;
    options.fault_hook = [&](std::string_view p) {
      if (p == point) throw Crash(std::string(p));
    };
    {
      ArtworkStore store(dir.path(), options);
      EXPECT_THROW(store.put(record_for(1), bytes), Crash) << point;
    }
    ArtworkStore recovered(dir.path());
    const auto got = recovered.get(record_for(1).artwork_id);
    if (point == "after-index") {
      EXPECT_EQ(got, bytes) << point;
    } else {
      EXPECT_FALSE(got) << point;
    }
    EXPECT_EQ(recovered.get(record_for(2).artwork_id), payload_of(50, 2)) << point;
    // No temp or orphan files survive recovery.
    std::size_t files = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir.path() / "objects")) {
      EXPECT_EQ(e.path().extension(), ".gstb") << point;
      ++files;
    }
    EXPECT_EQ(files, recovered.count()) << point;
    // And the id can be written again.
    EXPECT_EQ(recovered.put(record_for(1), bytes) == ArtworkStore::PutResult::kCreated,
              point != "after-index");
  }
}

TEST(Store, TornIndexLineIsIgnored) {
  TempDir dir;
  {
    ArtworkStore store(dir.path());
    store.put(record_for(1), payload_of(30, 1));
  }
  {
    std::ofstream log(dir.path() / "index.log", std::ios::app);
    log << R"({"op":"put","id":"000000)";
  }
  ArtworkStore store(dir.path());
  EXPECT_EQ(store.count(), 1u);
  // The log is rewritten compacted, so the torn bytes are gone.
  EXPECT_EQ(testing::slurp(dir.path() / "index.log").find("000000\n"), std::string::npos);
}

TEST(Store, CorruptPayloadIsScrubbedAndDroppedOnRestart) {
  TempDir dir;
  {
    ArtworkStore store(dir.path());
    store.put(record_for(1), payload_of(64, 1));
    store.put(record_for(2), payload_of(64, 2));
    {
      std::fstream f(store.payload_path(record_for(2).artwork_id),
                     std::ios::in | std::ios::out | std::ios::binary);
      f.seekp(10);
      f.put('\x5A');
    }
    const auto bad = store.scrub();
    ASSERT_EQ(bad.size(), 1u);
    EXPECT_EQ(bad[0], record_for(2).artwork_id);
  }
  ArtworkStore store(dir.path());
  EXPECT_EQ(store.count(), 1u);
  EXPECT_TRUE(store.scrub().empty());
}

TEST(Store, ConcurrentSameIdPutsHaveOneWinner) {
  for (int round = 0; round < 20; ++round) {
    TempDir dir;
    ArtworkStore store(dir.path());
    std::atomic<int> created{0}, conflicts{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
      threads.emplace_back([&, t] {
        const auto r = store.put(record_for(42), payload_of(4096, static_cast<std::uint64_t>(t)));
        (r == ArtworkStore::PutResult::kCreated ? created : conflicts)++;
      });
    }
    for (auto& th : threads) th.join();
    EXPECT_EQ(created.load(), 1);
    EXPECT_EQ(conflicts.load(), 7);
    const auto got = store.get(record_for(42).artwork_id);
    ASSERT_TRUE(got);
    EXPECT_EQ(crc32_of(*got), store.record(record_for(42).artwork_id)->checksum);
  }
}

TEST(Store, ConcurrentDistinctPutsAndReads) {
  TempDir dir;
  {
    ArtworkStore store(dir.path());
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
      threads.emplace_back([&, t] {
        for (std::uint64_t i = 0; i < 25; ++i) {
          const std::uint64_t n = static_cast<std::uint64_t>(t) * 100 + i;
          ASSERT_EQ(store.put(record_for(n), payload_of(200 + i, n)), ArtworkStore::PutResult::kCreated);
          EXPECT_EQ(store.get(record_for(n).artwork_id), payload_of(200 + i, n));
          store.list(std::nullopt, 5, std::nullopt);
        }
      });
    }
    for (auto& th : threads) th.join();
    EXPECT_EQ(store.count(), 200u);
  }
  ArtworkStore reopened(dir.path());
  EXPECT_EQ(reopened.count(), 200u);
  EXPECT_TRUE(reopened.scrub().empty());
}

TEST(Store, PaginationWalksEverythingOnce) {
  TempDir dir;
  ArtworkStore store(dir.path());
  for (std::uint64_t i = 0; i < 23; ++i) {
    store.put(record_for(i, static_cast<std::int64_t>(i % 5), i % 3 == 0 ? "bo" : "ana"),
              payload_of(8, i));
  }
  std::vector<ArtworkRecord> seen;
  std::optional<std::string> cursor;
  int pages = 0;
  do {
    const auto page = store.list(std::nullopt, 4, cursor);
    ASSERT_LE(page.items.size(), 4u);
    seen.insert(seen.end(), page.items.begin(), page.items.end());
    cursor = page.next;
    ++pages;
  } while (cursor);
  EXPECT_EQ(pages, 6);
  ASSERT_EQ(seen.size(), 23u);
  for (std::size_t i = 1; i < seen.size(); ++i) {
    const auto& a = seen[i - 1];
    const auto& b = seen[i];
    EXPECT_TRUE(a.created_at > b.created_at ||
                (a.created_at == b.created_at && a.artwork_id < b.artwork_id));
  }

  const auto bo = store.list(std::string("bo"), 100, std::nullopt);
  EXPECT_EQ(bo.items.size(), 8u);
  EXPECT_FALSE(bo.next);
  for (const auto& r : bo.items) EXPECT_EQ(r.author, "bo");
  EXPECT_TRUE(store.list(std::string("nobody"), 10, std::nullopt).items.empty());
}

TEST(Store, BadCursorIsParameterError) {
  TempDir dir;
  ArtworkStore store(dir.path());
  for (const char* c : {"zz", "abc", "3a", ""}) {
    try {
      store.list(std::nullopt, 10, std::string(c));
      FAIL() << c;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kParameter);
    }
  }
}

}  // namespace
}  // namespace gesto
