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

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pwsm {
namespace {

bool is_finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

PrivacyRequirement::PrivacyRequirement(std::uint32_t user, std::int32_t window,
                                       double budget)
    : user_(user), window_(window), budget_(budget) {
  if (window < 1) {
    throw std::invalid_argument("invalid window: must be >= 1, got " +
                                std::to_string(window));
  }
  if (!is_finite_positive(budget)) {
    throw std::invalid_argument("invalid budget: must be positive and finite");
  }
}

SlotDatabase::SlotDatabase(std::int64_t slot, std::uint32_t domain_size,
                           std::vector<std::int32_t> values)
    : slot_(slot), domain_size_(domain_size), values_(std::move(values)) {
  if (slot < 1) {
    throw std::invalid_argument("invalid slot: must be >= 1, got " +
                                std::to_string(slot));
  }
  if (domain_size < 1) {
    throw std::invalid_argument("invalid domain size: must be >= 1");
  }
  for (std::int32_t v : values_) {
    if (v != kAbsent &&
        (v < 0 || static_cast<std::uint32_t>(v) >= domain_size)) {
      throw std::invalid_argument("invalid category " + std::to_string(v) +
                                  " for domain size " +
                                  std::to_string(domain_size));
    }
  }
}

Histogram::Histogram(std::vector<double> bins, bool exact)
    : bins_(std::move(bins)), exact_(exact) {}

Histogram Histogram::exact(std::vector<double> bins) {
  for (double b : bins) {
    if (!std::isfinite(b) || b < 0.0 || std::floor(b) != b) {
      throw std::invalid_argument(
          "invalid exact histogram: bins must be non-negative integers");
    }
  }
  return Histogram(std::move(bins), /*exact=*/true);
}

Histogram Histogram::perturbed(std::vector<double> bins) {
  for (double b : bins) {
    if (!std::isfinite(b)) {
      throw std::invalid_argument(
          "invalid perturbed histogram: bins must be finite");
    }
  }
  return Histogram(std::move(bins), /*exact=*/false);
}

Histogram Histogram::zeros(std::uint32_t domain_size) {
  return Histogram(std::vector<double>(domain_size, 0.0), /*exact=*/false);
}

Publication::Publication(PublicationKind kind, std::int64_t slot,
                         Histogram histogram, double threshold,
                         std::int64_t source_slot)
    : kind_(kind),
      slot_(slot),
      histogram_(std::move(histogram)),
      threshold_(threshold),
      source_slot_(source_slot) {}

Publication Publication::fresh(std::int64_t slot, Histogram histogram,
                               double threshold) {
  if (slot < 1) {
    throw std::invalid_argument("invalid publication slot");
  }
  if (!is_finite_positive(threshold)) {
    throw std::invalid_argument(
        "invalid threshold: fresh releases need a positive threshold");
  }
  return Publication(PublicationKind::kFresh, slot, std::move(histogram),
                     threshold, /*source_slot=*/-1);
}

Publication Publication::approximated(std::int64_t slot, Histogram histogram,
                                      std::int64_t source_slot) {
  if (slot < 1) {
    throw std::invalid_argument("invalid publication slot");
  }
  if (source_slot < 0 || source_slot >= slot) {
    throw std::invalid_argument("invalid source slot");
  }
  return Publication(PublicationKind::kApproximated, slot,
                     std::move(histogram), /*threshold=*/0.0, source_slot);
}

Publication Publication::nullified(std::int64_t slot, Histogram histogram,
                                   std::int64_t source_slot) {
  if (slot < 1) {
    throw std::invalid_argument("invalid publication slot");
  }
  if (source_slot < 0 || source_slot >= slot) {
    throw std::invalid_argument("invalid source slot");
  }
  return Publication(PublicationKind::kNullified, slot, std::move(histogram),
                     /*threshold=*/0.0, source_slot);
}

double BudgetGroups::min_budget() const {
  if (entries_.empty()) {
    throw std::invalid_argument("no requirements: budget groups are empty");
  }
  return entries_.front().budget;
}

double BudgetGroups::max_budget() const {
  if (entries_.empty()) {
    throw std::invalid_argument("no requirements: budget groups are empty");
  }
  return entries_.back().budget;
}

BudgetGroups build_budget_groups(std::span<const double> budgets) {
  BudgetGroups groups;
  std::vector<double> sorted(budgets.begin(), budgets.end());
  for (double b : sorted) {
    if (!is_finite_positive(b)) {
      throw std::invalid_argument(
          "invalid budget: must be positive and finite");
    }
  }
  std::sort(sorted.begin(), sorted.end());
  for (double b : sorted) {
    if (!groups.entries_.empty() && groups.entries_.back().budget == b) {
      ++groups.entries_.back().count;
    } else {
      groups.entries_.push_back({b, 1});
    }
  }
  groups.total_count_ = static_cast<std::uint32_t>(sorted.size());
  return groups;
}

void validate_requirements(std::span<const PrivacyRequirement> requirements) {
  if (requirements.empty()) {
    throw std::invalid_argument("no requirements: population is empty");
  }
  for (std::size_t i = 0; i < requirements.size(); ++i) {
    if (requirements[i].user() != i) {
      throw std::invalid_argument(
          "invalid requirements: user indices must be dense 0..n-1");
    }
  }
}

}  // namespace pwsm
