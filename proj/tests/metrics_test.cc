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

#include "pwsm/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "pwsm/model.hpp"
#include "pwsm/random.hpp"
#include "test_util.hpp"

namespace pwsm {
namespace {

using pwsm::testing::ThrowsWith;

std::vector<Histogram> Series(std::vector<std::vector<double>> bins) {
  std::vector<Histogram> out;
  for (auto& b : bins) out.push_back(Histogram::perturbed(std::move(b)));
  return out;
}

TEST(AmreTest, SingleSlotHandValue) {
  // ((1-2)^2 + (3-1)^2) / 2 = 2.5
  EXPECT_EQ(amre(Series({{1.0, 3.0}}), Series({{2.0, 1.0}})), 2.5);
}

TEST(AmreTest, IdenticalSeriesScoreZero) {
  auto series = Series({{4.0, 1.0}, {2.0, 2.0}});
  EXPECT_EQ(amre(series, series), 0.0);
}

TEST(AmreTest, AveragesOverSlotsAndBins) {
  // Slot errors 2.5 and 0.5 average to 1.5.
  auto released = Series({{1.0, 3.0}, {1.0, 0.0}});
  auto truth = Series({{2.0, 1.0}, {0.0, 0.0}});
  EXPECT_EQ(amre(released, truth), 1.5);
}

TEST(AmreTest, NegativeReleasesCountAtFaceValue) {
  // (-1 - 1)^2 / 1 = 4: the released estimate is used as-is.
  EXPECT_EQ(amre(Series({{-1.0}}), Series({{1.0}})), 4.0);
}

TEST(AjsdTest, IdenticalSeriesScoreZero) {
  auto series = Series({{3.0, 5.0}, {1.0, 0.0}});
  EXPECT_EQ(ajsd(series, series), 0.0);
}

TEST(AjsdTest, DisjointSupportHitsTheLogTwoCeiling) {
  auto released = Series({{0.0, 7.0}});
  auto truth = Series({{5.0, 0.0}});
  EXPECT_NEAR(ajsd(released, truth), std::numbers::ln2, 1e-12);
}

TEST(AjsdTest, StaysWithinTheLogTwoCeilingOnRandomInput) {
  RandomSource rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> released(4);
    std::vector<double> truth(4);
    for (int b = 0; b < 4; ++b) {
      released[b] = rng.laplace(5.0);  // may be negative
      truth[b] = std::floor(10.0 * rng.next_double());
    }
    truth[0] += 1.0;  // keep some mass
    double value = ajsd(Series({released}), Series({truth}));
    EXPECT_GE(value, 0.0);
    EXPECT_LE(value, std::numbers::ln2 + 1e-12);
  }
}

TEST(AjsdTest, NegativeBinsAreClampedBeforeNormalizing) {
  auto truth = Series({{2.0, 2.0}});
  double clamped = ajsd(Series({{-5.0, 5.0}}), truth);
  double explicit_zero = ajsd(Series({{0.0, 5.0}}), truth);
  EXPECT_EQ(clamped, explicit_zero);
}

TEST(AjsdTest, AllZeroReleaseFallsBackToUniform) {
  auto truth = Series({{3.0, 1.0}});
  double fallback = ajsd(Series({{0.0, 0.0}}), truth);
  double uniform = ajsd(Series({{0.5, 0.5}}), truth);
  EXPECT_EQ(fallback, uniform);
  EXPECT_GT(fallback, 0.0);
}

TEST(AjsdTest, RequiresTruthMass) {
  EXPECT_TRUE(ThrowsWith(
      [] { ajsd(Series({{1.0, 0.0}}), Series({{0.0, 0.0}})); }, "no mass"));
}

TEST(MetricsTest, RejectLengthAndShapeMismatches) {
  EXPECT_TRUE(ThrowsWith([] { amre(Series({}), Series({})); },
                         "length mismatch"));
  EXPECT_TRUE(ThrowsWith(
      [] { amre(Series({{1.0}}), Series({{1.0}, {2.0}})); },
      "length mismatch"));
  EXPECT_TRUE(ThrowsWith(
      [] { amre(Series({{1.0}}), Series({{1.0, 2.0}})); },
      "length mismatch"));
  EXPECT_TRUE(ThrowsWith(
      [] { ajsd(Series({{1.0}}), Series({{1.0, 2.0}})); },
      "length mismatch"));
}

// Averaging property: the two-slot score is the mean of the single-slot
// scores.
TEST(AjsdTest, AveragesOverSlots) {
  auto r1 = Series({{0.0, 7.0}});
  auto t1 = Series({{5.0, 0.0}});
  auto r2 = Series({{2.0, 2.0}});
  auto t2 = Series({{2.0, 2.0}});
  double separate = (ajsd(r1, t1) + ajsd(r2, t2)) / 2.0;
  double joint = ajsd(Series({{0.0, 7.0}, {2.0, 2.0}}),
                      Series({{5.0, 0.0}, {2.0, 2.0}}));
  EXPECT_NEAR(joint, separate, 1e-15);
}

// Scale invariance of the divergence: released histograms are normalized, so
// doubling every bin changes nothing.
TEST(AjsdTest, ReleasedScaleDoesNotMatter) {
  auto truth = Series({{4.0, 6.0, 2.0}});
  EXPECT_EQ(ajsd(Series({{1.0, 2.0, 3.0}}), truth),
            ajsd(Series({{2.0, 4.0, 6.0}}), truth));
}

}  // namespace
}  // namespace pwsm
