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

#ifndef PWSM_MODEL_HPP_
#define PWSM_MODEL_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace pwsm {

// One stream participant's privacy demand: within any `window` consecutive
// time slots, releases may spend at most `budget` of differential privacy on
// this user's data. `user` is the dense index of the participant in the
// enrolled population.
class PrivacyRequirement {
 public:
  PrivacyRequirement(std::uint32_t user, std::int32_t window, double budget);

  std::uint32_t user() const { return user_; }
  std::int32_t window() const { return window_; }
  double budget() const { return budget_; }

  // Per-slot budget share epsilon/window: the steady-state rate at which the
  // user's budget may be consumed.
  double slot_share() const { return budget_ / window_; }
  // Half of slot_share(): the unit spent on the dissimilarity probe each
  // slot, and the unit in which adaptive publication budgets are granted.
  double half_share() const { return budget_ / (2.0 * window_); }

  friend bool operator==(const PrivacyRequirement&,
                         const PrivacyRequirement&) = default;

 private:
  std::uint32_t user_;
  std::int32_t window_;
  double budget_;
};

// Snapshot of all enrolled users at one time slot. Each user either reports
// one category in [0, domain_size) or is absent (kAbsent). Slots are
// 1-based.
class SlotDatabase {
 public:
  static constexpr std::int32_t kAbsent = -1;

  SlotDatabase(std::int64_t slot, std::uint32_t domain_size,
               std::vector<std::int32_t> values);

  std::int64_t slot() const { return slot_; }
  std::uint32_t domain_size() const { return domain_size_; }
  const std::vector<std::int32_t>& values() const { return values_; }
  std::uint32_t user_count() const {
    return static_cast<std::uint32_t>(values_.size());
  }

  friend bool operator==(const SlotDatabase&, const SlotDatabase&) = default;

 private:
  std::int64_t slot_;
  std::uint32_t domain_size_;
  std::vector<std::int32_t> values_;
};

// A histogram over the category domain. Exact histograms hold non-negative
// integer-valued bins (true counts); perturbed histograms hold arbitrary
// finite reals (noisy or estimated releases).
class Histogram {
 public:
  static Histogram exact(std::vector<double> bins);
  static Histogram perturbed(std::vector<double> bins);
  // All-zero perturbed histogram: the pre-stream baseline release.
  static Histogram zeros(std::uint32_t domain_size);

  const std::vector<double>& bins() const { return bins_; }
  std::uint32_t size() const { return static_cast<std::uint32_t>(bins_.size()); }
  bool is_exact() const { return exact_; }

  friend bool operator==(const Histogram&, const Histogram&) = default;

 private:
  Histogram(std::vector<double> bins, bool exact);

  std::vector<double> bins_;
  bool exact_;
};

enum class PublicationKind { kFresh, kApproximated, kNullified };

// One released histogram. A fresh release carries the sampling threshold
// that calibrated its noise; approximated and nullified releases repeat the
// bins released at `source_slot` (source slot 0 denotes the all-zero
// pre-stream baseline).
class Publication {
 public:
  static Publication fresh(std::int64_t slot, Histogram histogram,
                           double threshold);
  static Publication approximated(std::int64_t slot, Histogram histogram,
                                  std::int64_t source_slot);
  static Publication nullified(std::int64_t slot, Histogram histogram,
                               std::int64_t source_slot);

  PublicationKind kind() const { return kind_; }
  std::int64_t slot() const { return slot_; }
  const Histogram& histogram() const { return histogram_; }
  // Sampling threshold of a fresh release; 0 otherwise.
  double threshold() const { return threshold_; }
  // Slot whose bins a non-fresh release repeats; -1 for fresh releases.
  std::int64_t source_slot() const { return source_slot_; }

  friend bool operator==(const Publication&, const Publication&) = default;

 private:
  Publication(PublicationKind kind, std::int64_t slot, Histogram histogram,
              double threshold, std::int64_t source_slot);

  PublicationKind kind_;
  std::int64_t slot_;
  Histogram histogram_;
  double threshold_;
  std::int64_t source_slot_;
};

// The distinct declared budgets of a population in ascending order, each
// with its multiplicity. Grouping is by exact floating-point value.
class BudgetGroups {
 public:
  struct Entry {
    double budget;
    std::uint32_t count;

    friend bool operator==(const Entry&, const Entry&) = default;
  };

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::uint32_t total_count() const { return total_count_; }
  double min_budget() const;
  double max_budget() const;

  friend bool operator==(const BudgetGroups&, const BudgetGroups&) = default;
  friend BudgetGroups build_budget_groups(std::span<const double> budgets);

 private:
  BudgetGroups() = default;

  std::vector<Entry> entries_;
  std::uint32_t total_count_ = 0;
};

// Groups a population's declared budgets. Every budget must be positive and
// finite. An empty input yields empty groups.
BudgetGroups build_budget_groups(std::span<const double> budgets);

// Validates a population: non-empty, and user indices are exactly 0..n-1 in
// order. Throws std::invalid_argument otherwise.
void validate_requirements(std::span<const PrivacyRequirement> requirements);

}  // namespace pwsm

#endif  // PWSM_MODEL_HPP_
