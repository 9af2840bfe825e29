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

#include "pwsm/model.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pwsm/random.hpp"
#include "test_util.hpp"

namespace pwsm {
namespace {

using pwsm::testing::ThrowsWith;

TEST(PrivacyRequirementTest, StoresFieldsAndDerivedShares) {
  PrivacyRequirement req(3, 4, 0.8);
  EXPECT_EQ(req.user(), 3u);
  EXPECT_EQ(req.window(), 4);
  EXPECT_EQ(req.budget(), 0.8);
  EXPECT_EQ(req.slot_share(), 0.8 / 4);
  EXPECT_EQ(req.half_share(), 0.8 / 8);
}

TEST(PrivacyRequirementTest, RejectsInvalidWindowAndBudget) {
  EXPECT_TRUE(ThrowsWith([] { PrivacyRequirement(0, 0, 0.5); }, "window"));
  EXPECT_TRUE(ThrowsWith([] { PrivacyRequirement(0, -2, 0.5); }, "window"));
  EXPECT_TRUE(ThrowsWith([] { PrivacyRequirement(0, 3, 0.0); }, "budget"));
  EXPECT_TRUE(ThrowsWith([] { PrivacyRequirement(0, 3, -1.0); }, "budget"));
  EXPECT_TRUE(ThrowsWith(
      [] { PrivacyRequirement(0, 3, std::numeric_limits<double>::infinity()); },
      "budget"));
  EXPECT_TRUE(ThrowsWith(
      [] {
        PrivacyRequirement(0, 3, std::numeric_limits<double>::quiet_NaN());
      },
      "budget"));
}

TEST(SlotDatabaseTest, AcceptsCategoriesAndAbsences) {
  SlotDatabase db(1, 3, {0, SlotDatabase::kAbsent, 2, 1});
  EXPECT_EQ(db.slot(), 1);
  EXPECT_EQ(db.domain_size(), 3u);
  EXPECT_EQ(db.user_count(), 4u);
  EXPECT_EQ(db.values()[1], SlotDatabase::kAbsent);
}

TEST(SlotDatabaseTest, RejectsBadSlotDomainAndValues) {
  EXPECT_TRUE(ThrowsWith([] { SlotDatabase(0, 2, {0}); }, "slot"));
  EXPECT_TRUE(ThrowsWith([] { SlotDatabase(-5, 2, {0}); }, "slot"));
  EXPECT_TRUE(ThrowsWith([] { SlotDatabase(1, 0, {}); }, "domain"));
  EXPECT_TRUE(ThrowsWith([] { SlotDatabase(1, 2, {2}); }, "category"));
  EXPECT_TRUE(ThrowsWith([] { SlotDatabase(1, 2, {-2}); }, "category"));
}

TEST(HistogramTest, ExactRequiresNonNegativeIntegers) {
  Histogram h = Histogram::exact({2.0, 0.0, 7.0});
  EXPECT_TRUE(h.is_exact());
  EXPECT_EQ(h.size(), 3u);
  EXPECT_TRUE(ThrowsWith([] { Histogram::exact({1.5}); }, "integer"));
  EXPECT_TRUE(ThrowsWith([] { Histogram::exact({-1.0}); }, ""));
}

TEST(HistogramTest, PerturbedAllowsArbitraryFiniteReals) {
  Histogram h = Histogram::perturbed({-3.2, 0.0, 11.7});
  EXPECT_FALSE(h.is_exact());
  EXPECT_EQ(h.bins()[0], -3.2);
  EXPECT_TRUE(ThrowsWith(
      [] { Histogram::perturbed({std::numeric_limits<double>::infinity()}); },
      ""));
}

TEST(HistogramTest, ZerosIsTheAllZeroBaseline) {
  Histogram h = Histogram::zeros(4);
  EXPECT_FALSE(h.is_exact());
  ASSERT_EQ(h.size(), 4u);
  for (double b : h.bins()) EXPECT_EQ(b, 0.0);
}

TEST(PublicationTest, CarriesKindSpecificMetadata) {
  Publication fresh = Publication::fresh(5, Histogram::perturbed({1.0}), 0.4);
  EXPECT_EQ(fresh.kind(), PublicationKind::kFresh);
  EXPECT_EQ(fresh.slot(), 5);
  EXPECT_EQ(fresh.threshold(), 0.4);
  EXPECT_EQ(fresh.source_slot(), -1);

  Publication approx =
      Publication::approximated(6, Histogram::perturbed({1.0}), 5);
  EXPECT_EQ(approx.kind(), PublicationKind::kApproximated);
  EXPECT_EQ(approx.source_slot(), 5);
  EXPECT_EQ(approx.threshold(), 0.0);

  Publication null = Publication::nullified(7, Histogram::perturbed({1.0}), 5);
  EXPECT_EQ(null.kind(), PublicationKind::kNullified);
  EXPECT_EQ(null.source_slot(), 5);
}

TEST(PublicationTest, ValidatesSlotAndMetadata) {
  Histogram h = Histogram::perturbed({1.0});
  EXPECT_TRUE(ThrowsWith([&] { Publication::fresh(0, h, 0.4); }, "slot"));
  EXPECT_TRUE(ThrowsWith([&] { Publication::fresh(3, h, 0.0); }, "threshold"));
  EXPECT_TRUE(ThrowsWith([&] { Publication::approximated(3, h, 3); }, ""));
  EXPECT_TRUE(ThrowsWith([&] { Publication::nullified(3, h, -1); }, ""));
}

TEST(BudgetGroupsTest, GroupsMixedPopulation) {
  std::vector<double> budgets = {0.1, 0.4, 0.4, 0.1, 0.4,
                                 0.4, 0.8, 0.8, 0.8, 0.4};
  BudgetGroups groups = build_budget_groups(budgets);
  ASSERT_EQ(groups.entries().size(), 3u);
  EXPECT_EQ(groups.entries()[0], (BudgetGroups::Entry{0.1, 2}));
  EXPECT_EQ(groups.entries()[1], (BudgetGroups::Entry{0.4, 5}));
  EXPECT_EQ(groups.entries()[2], (BudgetGroups::Entry{0.8, 3}));
  EXPECT_EQ(groups.total_count(), 10u);
  EXPECT_EQ(groups.min_budget(), 0.1);
  EXPECT_EQ(groups.max_budget(), 0.8);
}

TEST(BudgetGroupsTest, SingleUserAndUniformPopulations) {
  BudgetGroups single = build_budget_groups(std::vector<double>{0.5});
  ASSERT_EQ(single.entries().size(), 1u);
  EXPECT_EQ(single.entries()[0], (BudgetGroups::Entry{0.5, 1}));

  BudgetGroups uniform = build_budget_groups(std::vector<double>{0.3, 0.3, 0.3});
  ASSERT_EQ(uniform.entries().size(), 1u);
  EXPECT_EQ(uniform.entries()[0], (BudgetGroups::Entry{0.3, 3}));
}

TEST(BudgetGroupsTest, EmptyGroupsRefuseBudgetQueries) {
  BudgetGroups empty = build_budget_groups(std::vector<double>{});
  EXPECT_TRUE(empty.empty());
  EXPECT_EQ(empty.total_count(), 0u);
  EXPECT_TRUE(ThrowsWith([&] { empty.min_budget(); }, "no requirements"));
  EXPECT_TRUE(ThrowsWith([&] { empty.max_budget(); }, "no requirements"));
}

TEST(BudgetGroupsTest, RejectsNonPositiveBudgets) {
  EXPECT_TRUE(ThrowsWith(
      [] { build_budget_groups(std::vector<double>{0.5, 0.0}); },
      "invalid budget"));
  EXPECT_TRUE(ThrowsWith(
      [] { build_budget_groups(std::vector<double>{-0.1}); },
      "invalid budget"));
  EXPECT_TRUE(ThrowsWith(
      [] {
        build_budget_groups(
            std::vector<double>{std::numeric_limits<double>::infinity()});
      },
      "invalid budget"));
}

// Expanding the groups back out must reproduce the input as a multiset:
// grouping loses order but neither values nor multiplicities.
TEST(BudgetGroupsTest, RoundTripsRandomMultisets) {
  RandomSource rng(20260819);
  for (int trial = 0; trial < 100; ++trial) {
    std::uint32_t n = 1 + rng.uniform_int(40);
    std::vector<double> palette;
    std::uint32_t distinct = 1 + rng.uniform_int(6);
    for (std::uint32_t i = 0; i < distinct; ++i) {
      palette.push_back(0.05 + 1.95 * rng.next_double());
    }
    std::vector<double> budgets;
    for (std::uint32_t i = 0; i < n; ++i) {
      budgets.push_back(palette[rng.uniform_int(distinct)]);
    }

    BudgetGroups groups = build_budget_groups(budgets);
    std::vector<double> expanded;
    double previous = 0.0;
    for (const auto& entry : groups.entries()) {
      EXPECT_GT(entry.budget, previous);  // strictly ascending, deduplicated
      previous = entry.budget;
      for (std::uint32_t k = 0; k < entry.count; ++k) {
        expanded.push_back(entry.budget);
      }
    }
    std::vector<double> sorted = budgets;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(expanded, sorted);
    EXPECT_EQ(groups.total_count(), n);
  }
}

TEST(ValidateRequirementsTest, AcceptsDenseIndicesRejectsGapsAndEmpty) {
  std::vector<PrivacyRequirement> good = {{0, 3, 0.5}, {1, 4, 0.7}};
  EXPECT_NO_THROW(validate_requirements(good));

  EXPECT_TRUE(ThrowsWith(
      [] {
        validate_requirements(std::vector<PrivacyRequirement>{});
      },
      "no requirements"));

  std::vector<PrivacyRequirement> gap = {{0, 3, 0.5}, {2, 4, 0.7}};
  EXPECT_TRUE(ThrowsWith([&] { validate_requirements(gap); }, "user"));

  std::vector<PrivacyRequirement> dup = {{0, 3, 0.5}, {0, 4, 0.7}};
  EXPECT_TRUE(ThrowsWith([&] { validate_requirements(dup); }, "user"));
}

}  // namespace
}  // namespace pwsm
