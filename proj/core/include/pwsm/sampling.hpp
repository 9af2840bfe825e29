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
//
// Personalized sampling mechanism: users whose declared budget reaches a
// common threshold are kept, weaker users are kept with a probability that
// equalizes their effective budget at the threshold, and the resulting exact
// counts are released with Laplace noise calibrated to the threshold. OBS
// picks the threshold that minimizes the combined sampling + noise error.

#ifndef PWSM_SAMPLING_HPP_
#define PWSM_SAMPLING_HPP_

#include <span>

#include "pwsm/model.hpp"
#include "pwsm/random.hpp"

namespace pwsm {

// Error of a candidate threshold, split into its two sources. `sampling` is
// the variance plus squared bias introduced by subsampling weak users;
// `noise` is the variance of the threshold-calibrated Laplace perturbation.
struct ErrorBreakdown {
  double sampling = 0.0;
  double noise = 0.0;

  double total() const { return sampling + noise; }
};

// Probability of keeping a user whose declared budget falls below the
// sampling threshold: (e^budget - 1) / (e^threshold - 1), which makes the
// kept record budget-equivalent to one declared at the threshold. Returns 1
// when budget >= threshold. Both arguments must be positive and finite.
double inclusion_probability(double budget, double threshold);

// Expected subsampling error at `threshold` for a population of declared
// budgets: sum of per-user Bernoulli variances plus the squared expected
// count deficit, over all groups strictly below the threshold.
double sampling_error(const BudgetGroups& groups, double threshold);

// Variance of Laplace noise with scale sensitivity/threshold:
// 2 * (sensitivity / threshold)^2.
double noise_error(double threshold, double sensitivity);

struct ObsResult {
  double threshold = 0.0;  // the winning declared budget
  double error = 0.0;      // its combined error
  ErrorBreakdown breakdown;
};

// Optimal budget selection: scans the distinct declared budgets in
// ascending order and returns the first one minimizing
// sampling_error + noise_error (strict improvement, so ties keep the
// smaller budget). Empty groups are an error.
ObsResult obs(const BudgetGroups& groups, double sensitivity = 1.0);

// Closed-form cap on obs(...).error: the better of keeping everyone at the
// weakest budget (no sampling error) or keeping only the strongest group.
double obs_error_bound(const BudgetGroups& groups, double sensitivity = 1.0);

// Exact histogram of present users' categories.
Histogram count_query(const SlotDatabase& db);

// Sampling step: keeps present users whose budget reaches the threshold,
// keeps weaker present users independently with inclusion_probability, and
// surely drops users with a non-positive budget (their inclusion
// probability limit). `budgets` must have one entry per enrolled user.
SlotDatabase sample_database(const SlotDatabase& db,
                             std::span<const double> budgets, double threshold,
                             RandomSource& rng);

// Perturbation step: adds independent Laplace(sensitivity / threshold)
// noise to every bin.
Histogram perturb_histogram(const Histogram& histogram, double threshold,
                            double sensitivity, RandomSource& rng);

}  // namespace pwsm

#endif  // PWSM_SAMPLING_HPP_
