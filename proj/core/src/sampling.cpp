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

#include "pwsm/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pwsm {
namespace {

void check_positive_finite(double x, const char* what) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw std::invalid_argument(std::string("invalid ") + what +
                                ": must be positive and finite");
  }
}

}  // namespace

double inclusion_probability(double budget, double threshold) {
  check_positive_finite(budget, "budget");
  check_positive_finite(threshold, "threshold");
  if (budget >= threshold) {
    return 1.0;
  }
  return std::expm1(budget) / std::expm1(threshold);
}

double sampling_error(const BudgetGroups& groups, double threshold) {
  check_positive_finite(threshold, "threshold");
  double variance = 0.0;
  double deficit = 0.0;  // expected count lost to subsampling
  for (const auto& entry : groups.entries()) {
    if (entry.budget >= threshold) {
      break;  // entries are ascending; the rest are kept surely
    }
    const double p = std::expm1(entry.budget) / std::expm1(threshold);
    const double n = static_cast<double>(entry.count);
    variance += n * p * (1.0 - p);
    deficit += n * (1.0 - p);
  }
  return variance + deficit * deficit;
}

double noise_error(double threshold, double sensitivity) {
  check_positive_finite(threshold, "threshold");
  check_positive_finite(sensitivity, "sensitivity");
  const double ratio = sensitivity / threshold;
  return 2.0 * ratio * ratio;
}

ObsResult obs(const BudgetGroups& groups, double sensitivity) {
  check_positive_finite(sensitivity, "sensitivity");
  if (groups.empty()) {
    throw std::invalid_argument("no requirements: cannot select a threshold");
  }
  ObsResult best;
  best.error = std::numeric_limits<double>::infinity();
  for (const auto& entry : groups.entries()) {
    ErrorBreakdown breakdown{sampling_error(groups, entry.budget),
                             noise_error(entry.budget, sensitivity)};
    const double error = breakdown.total();
    if (error < best.error) {
      best = ObsResult{entry.budget, error, breakdown};
    }
  }
  return best;
}

double obs_error_bound(const BudgetGroups& groups, double sensitivity) {
  check_positive_finite(sensitivity, "sensitivity");
  if (groups.empty()) {
    throw std::invalid_argument("no requirements: cannot bound the error");
  }
  const double weakest = noise_error(groups.min_budget(), sensitivity);
  const double strongest_count =
      static_cast<double>(groups.entries().back().count);
  const double dropped =
      static_cast<double>(groups.total_count()) - strongest_count;
  const double strongest = dropped * (dropped + 0.25) +
                           noise_error(groups.max_budget(), sensitivity);
  return std::min(weakest, strongest);
}

Histogram count_query(const SlotDatabase& db) {
  std::vector<double> bins(db.domain_size(), 0.0);
  for (std::int32_t v : db.values()) {
    if (v != SlotDatabase::kAbsent) {
      bins[static_cast<std::size_t>(v)] += 1.0;
    }
  }
  return Histogram::exact(std::move(bins));
}

SlotDatabase sample_database(const SlotDatabase& db,
                             std::span<const double> budgets, double threshold,
                             RandomSource& rng) {
  check_positive_finite(threshold, "threshold");
  if (budgets.size() != db.user_count()) {
    throw std::invalid_argument(
        "invalid budgets: need one budget per enrolled user");
  }
  std::vector<std::int32_t> kept(db.values());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (kept[i] == SlotDatabase::kAbsent) {
      continue;
    }
    const double budget = budgets[i];
    if (!std::isfinite(budget)) {
      throw std::invalid_argument("invalid budget: must be finite");
    }
    if (budget >= threshold) {
      continue;
    }
    const bool keep =
        budget > 0.0 &&
        rng.bernoulli(std::expm1(budget) / std::expm1(threshold));
    if (!keep) {
      kept[i] = SlotDatabase::kAbsent;
    }
  }
  return SlotDatabase(db.slot(), db.domain_size(), std::move(kept));
}

Histogram perturb_histogram(const Histogram& histogram, double threshold,
                            double sensitivity, RandomSource& rng) {
  check_positive_finite(threshold, "threshold");
  check_positive_finite(sensitivity, "sensitivity");
  const double scale = sensitivity / threshold;
  std::vector<double> bins(histogram.bins());
  for (double& b : bins) {
    b += rng.laplace(scale);
  }
  return Histogram::perturbed(std::move(bins));
}

}  // namespace pwsm
