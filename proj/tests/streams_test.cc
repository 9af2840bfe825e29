// Copyright 2026 The PWSM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pwsm/streams.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "pwsm/random.hpp"
#include "pwsm/sampling.hpp"
#include "test_util.hpp"

namespace pwsm {
namespace {

using pwsm::testing::ScratchDir;
using pwsm::testing::ThrowsWith;
using pwsm::testing::WriteFile;

TEST(RandomWalkStreamTest, ZeroStepStaysAtTheStart) {
  RandomSource rng(1);
  std::vector<double> path =
      tlns_probability_path(50, TlnsParams{0.05, 0.0}, rng);
  ASSERT_EQ(path.size(), 50u);
  for (double p : path) EXPECT_EQ(p, 0.05);
}

TEST(RandomWalkStreamTest, FirstValueIsExactlyTheStart) {
  RandomSource rng(2);
  std::vector<double> path = tlns_probability_path(10, TlnsParams{}, rng);
  EXPECT_EQ(path[0], 0.05);
}

TEST(RandomWalkStreamTest, PathIsClampedToProbabilities) {
  RandomSource rng(3);
  std::vector<double> path =
      tlns_probability_path(2000, TlnsParams{0.5, 0.4}, rng);
  for (double p : path) {
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
}

TEST(RandomWalkStreamTest, ZeroNoiseStreamHasNoEvents) {
  RandomSource rng(4, NoiseMode::kZeroNoise);
  std::vector<SlotDatabase> slots = gen_tlns(20, 30, TlnsParams{}, rng);
  ASSERT_EQ(slots.size(), 30u);
  for (const SlotDatabase& db : slots) {
    EXPECT_EQ(db.domain_size(), 2u);
    for (std::int32_t v : db.values()) EXPECT_EQ(v, 0);
  }
}

// Empirical slot frequencies must track the generating path: with 10^4
// users, at least 99% of slots land within three binomial standard errors.
TEST(RandomWalkStreamTest, CountsConcentrateAroundThePath) {
  const std::uint32_t n = 10000;
  const std::int64_t t_slots = 1000;
  RandomSource path_rng(5);
  std::vector<double> path =
      tlns_probability_path(t_slots, TlnsParams{}, path_rng);

  RandomSource gen_rng(5);  // same seed: identical path, then the bits
  std::vector<SlotDatabase> slots = gen_tlns(n, t_slots, TlnsParams{}, gen_rng);

  int within = 0;
  for (std::int64_t t = 0; t < t_slots; ++t) {
    double ones = count_query(slots[static_cast<std::size_t>(t)]).bins()[1];
    double p = path[static_cast<std::size_t>(t)];
    double se = std::sqrt(p * (1.0 - p) / n);
    if (std::abs(ones / n - p) <= 3.0 * se) ++within;
  }
  EXPECT_GE(within, 990);
}

TEST(RandomWalkStreamTest, ValidatesParameters) {
  RandomSource rng(1);
  EXPECT_TRUE(ThrowsWith(
      [&] { tlns_probability_path(10, TlnsParams{1.5, 0.0}, rng); },
      "start probability"));
  EXPECT_TRUE(ThrowsWith(
      [&] { tlns_probability_path(10, TlnsParams{0.5, -1.0}, rng); },
      "stddev"));
  EXPECT_TRUE(ThrowsWith([&] { gen_tlns(0, 10, TlnsParams{}, rng); },
                         "user count"));
}

TEST(SeasonalStreamTest, AnchorsPeakAndPeriod) {
  SinParams params;
  EXPECT_EQ(sin_probability(params, 0.0), 0.075);
  double quarter = std::numbers::pi / (2.0 * params.omega);
  EXPECT_NEAR(sin_probability(params, quarter), 0.125, 1e-12);
  double period = 2.0 * std::numbers::pi / params.omega;
  for (double t : {0.0, 17.3, 400.0}) {
    EXPECT_NEAR(sin_probability(params, t),
                sin_probability(params, t + period), 1e-12);
  }
}

TEST(SeasonalStreamTest, FirstSlotUsesTimeZero) {
  RandomSource a(6, NoiseMode::kZeroNoise);
  std::vector<SlotDatabase> slots = gen_sin(10, 3, SinParams{}, a);
  ASSERT_EQ(slots.size(), 3u);
  EXPECT_EQ(slots[0].slot(), 1);
  // Zero-noise coin: probability below one yields no events.
  for (std::int32_t v : slots[0].values()) EXPECT_EQ(v, 0);
}

TEST(SeasonalStreamTest, RejectsRangesOutsideProbabilities) {
  RandomSource rng(1);
  EXPECT_TRUE(ThrowsWith(
      [&] { gen_sin(5, 5, SinParams{0.2, 0.01, 0.1}, rng); },
      "probability range"));
  EXPECT_TRUE(ThrowsWith(
      [&] { gen_sin(5, 5, SinParams{0.6, 0.01, 0.5}, rng); },
      "probability range"));
}

TEST(RampStreamTest, StartsAtHalfAmplitudeAndSaturates) {
  LogParams params;
  EXPECT_EQ(log_probability(params, 0.0), 0.125);
  EXPECT_NEAR(log_probability(params, 1e6), 0.25, 1e-12);
  double previous = -1.0;
  for (double t = 0.0; t <= 2000.0; t += 50.0) {
    double p = log_probability(params, t);
    EXPECT_GT(p, previous);
    EXPECT_LT(p, params.amplitude);
    previous = p;
  }
}

TEST(RampStreamTest, ValidatesAmplitude) {
  RandomSource rng(1);
  EXPECT_TRUE(ThrowsWith([&] { gen_log(5, 5, LogParams{1.5, 0.01}, rng); },
                         "amplitude"));
}

TEST(GeneratedStreamsTest, ShapeIsBinaryWithAllUsersPresent) {
  RandomSource rng(7);
  for (auto& slots :
       {gen_sin(50, 20, SinParams{}, rng), gen_log(50, 20, LogParams{}, rng)}) {
    ASSERT_EQ(slots.size(), 20u);
    for (std::size_t k = 0; k < slots.size(); ++k) {
      EXPECT_EQ(slots[k].slot(), static_cast<std::int64_t>(k) + 1);
      EXPECT_EQ(slots[k].domain_size(), 2u);
      EXPECT_EQ(slots[k].user_count(), 50u);
      for (std::int32_t v : slots[k].values()) {
        EXPECT_TRUE(v == 0 || v == 1);
      }
    }
  }
}

TEST(GridBucketTest, CornersEdgesAndInteriorCells) {
  GridSpec grid;  // 10 x 10 over [116, 116.8] x [39.5, 40.3]
  EXPECT_EQ(grid.domain_size(), 100u);
  EXPECT_EQ(grid_bucket(116.0, 39.5, grid), 0u);
  EXPECT_EQ(grid_bucket(116.8, 40.3, grid), 99u);
  EXPECT_EQ(grid_bucket(116.45, 39.93, grid), 55u);
}

TEST(GridBucketTest, RejectsCoordinatesOutsideTheBox) {
  GridSpec grid;
  EXPECT_TRUE(
      ThrowsWith([&] { grid_bucket(115.9, 39.6, grid); }, "outside A_E"));
  EXPECT_TRUE(
      ThrowsWith([&] { grid_bucket(116.3, 40.4, grid); }, "outside A_E"));
}

TEST(IngestTest, SmallCategoryFile) {
  ScratchDir dir("streams");
  std::string path = dir.file("events.csv");
  WriteFile(path,
            "user_id,slot,category\n"
            "u1,1,0\n"
            "u2,1,2\n");
  IngestedStream stream = ingest_csv(path, CategoricalDomain{3});
  ASSERT_EQ(stream.slots.size(), 1u);
  EXPECT_EQ(stream.user_names, (std::vector<std::string>{"u1", "u2"}));
  EXPECT_EQ(count_query(stream.slots[0]).bins(),
            (std::vector<double>{1.0, 0.0, 1.0}));
}

TEST(IngestTest, EmptyFileYieldsEmptyStream) {
  ScratchDir dir("streams");
  std::string path = dir.file("empty.csv");
  WriteFile(path, "user_id,slot,category\n");
  IngestedStream stream = ingest_csv(path, CategoricalDomain{4});
  EXPECT_TRUE(stream.slots.empty());
  EXPECT_TRUE(stream.user_names.empty());
}

TEST(IngestTest, GapSlotsAreAllAbsent) {
  ScratchDir dir("streams");
  std::string path = dir.file("gaps.csv");
  WriteFile(path,
            "user_id,slot,category\n"
            "a,1,0\n"
            "a,4,1\n");
  IngestedStream stream = ingest_csv(path, CategoricalDomain{2});
  ASSERT_EQ(stream.slots.size(), 4u);
  EXPECT_EQ(stream.slots[1].values(),
            (std::vector<std::int32_t>{SlotDatabase::kAbsent}));
  EXPECT_EQ(stream.slots[2].values(),
            (std::vector<std::int32_t>{SlotDatabase::kAbsent}));
  EXPECT_EQ(stream.slots[3].values(), (std::vector<std::int32_t>{1}));
}

TEST(IngestTest, LaterDuplicateWinsAndUsersMapByFirstAppearance) {
  ScratchDir dir("streams");
  std::string path = dir.file("dup.csv");
  WriteFile(path,
            "user_id,slot,category\n"
            "x,2,1\n"
            "y,1,0\n"
            "x,2,0\n");
  IngestedStream stream = ingest_csv(path, CategoricalDomain{2});
  EXPECT_EQ(stream.user_names, (std::vector<std::string>{"x", "y"}));
  ASSERT_EQ(stream.slots.size(), 2u);
  EXPECT_EQ(stream.slots[1].values()[0], 0);  // the later row overwrote it
}

TEST(IngestTest, GridFilesBucketCoordinates) {
  ScratchDir dir("streams");
  std::string path = dir.file("grid.csv");
  WriteFile(path,
            "user_id,slot,lon,lat\n"
            "t1,1,116.0,39.5\n"
            "t2,1,116.45,39.93\n");
  IngestedStream stream = ingest_csv(path, GridSpec{});
  ASSERT_EQ(stream.slots.size(), 1u);
  EXPECT_EQ(stream.slots[0].domain_size(), 100u);
  EXPECT_EQ(stream.slots[0].values(), (std::vector<std::int32_t>{0, 55}));

  WriteFile(path, "user_id,slot,lon,lat\nt1,1,115.0,39.5\n");
  EXPECT_TRUE(
      ThrowsWith([&] { ingest_csv(path, GridSpec{}); }, "outside A_E"));
}

TEST(IngestTest, ReportsMalformedRowsWithLineNumbers) {
  ScratchDir dir("streams");
  std::string path = dir.file("bad.csv");
  WriteFile(path, "user_id,slot,category\na,1,0\nb,1\n");
  EXPECT_TRUE(ThrowsWith([&] { ingest_csv(path, CategoricalDomain{2}); },
                         ":3:"));

  WriteFile(path, "user_id,slot,category\na,0,0\n");
  EXPECT_TRUE(ThrowsWith([&] { ingest_csv(path, CategoricalDomain{2}); },
                         "slot must be >= 1"));

  WriteFile(path, "user_id,slot,category\na,1,5\n");
  EXPECT_TRUE(ThrowsWith([&] { ingest_csv(path, CategoricalDomain{2}); },
                         "out of range"));
}

// Random event files against a from-scratch tally of the same rows.
TEST(IngestTest, MatchesIndependentTallyOnRandomFiles) {
  ScratchDir dir("streams");
  RandomSource rng(88);
  const std::uint32_t d = 4;
  const int rows = 1000;

  std::string text = "user_id,slot,category\n";
  // (user, slot) -> category, last write winning, mirroring the contract.
  std::map<std::pair<std::string, std::int64_t>, std::int32_t> expected;
  std::int64_t max_slot = 0;
  for (int r = 0; r < rows; ++r) {
    std::string user = "u" + std::to_string(rng.uniform_int(37));
    std::int64_t slot = 1 + rng.uniform_int(50);
    std::int32_t category = static_cast<std::int32_t>(rng.uniform_int(d));
    text += user + "," + std::to_string(slot) + "," +
            std::to_string(category) + "\n";
    expected[{user, slot}] = category;
    max_slot = std::max(max_slot, slot);
  }
  std::string path = dir.file("random.csv");
  WriteFile(path, text);

  IngestedStream stream = ingest_csv(path, CategoricalDomain{d});
  ASSERT_EQ(static_cast<std::int64_t>(stream.slots.size()), max_slot);

  std::map<std::string, std::uint32_t> index;
  for (std::uint32_t i = 0; i < stream.user_names.size(); ++i) {
    index[stream.user_names[i]] = i;
  }
  // Every expected event is in place...
  for (const auto& [key, category] : expected) {
    const auto& [user, slot] = key;
    ASSERT_TRUE(index.count(user));
    EXPECT_EQ(stream.slots[static_cast<std::size_t>(slot - 1)]
                  .values()[index[user]],
              category);
  }
  // ...and everything else is absent.
  std::size_t present = 0;
  for (const SlotDatabase& db : stream.slots) {
    for (std::int32_t v : db.values()) {
      if (v != SlotDatabase::kAbsent) ++present;
    }
  }
  EXPECT_EQ(present, expected.size());
}

TEST(StreamCsvTest, WriteThenIngestReproducesCounts) {
  ScratchDir dir("streams");
  RandomSource rng(99);
  std::vector<SlotDatabase> slots = gen_sin(40, 25, SinParams{}, rng);
  std::string path = dir.file("round.csv");
  write_stream_csv(slots, path);

  IngestedStream back = ingest_csv(path, CategoricalDomain{2});
  ASSERT_EQ(back.slots.size(), slots.size());
  for (std::size_t k = 0; k < slots.size(); ++k) {
    EXPECT_EQ(count_query(back.slots[k]).bins(),
              count_query(slots[k]).bins());
  }
}

}  // namespace
}  // namespace pwsm
