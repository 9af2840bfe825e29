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
// Streaming histogram publishers under personalized sliding-window privacy
// demands. Every slot, each user offers half a slot share (budget/(2w)) to a
// noisy dissimilarity probe that compares fresh counts against the last
// fresh release; the probe decides whether releasing a new histogram beats
// repeating the previous one. The mechanisms differ in how they grant
// publication budgets:
//
//   PbdPublisher  budget distribution: offers half the budget still unspent
//                 inside each user's window.
//   PbaPublisher  budget absorption: accumulates one half-share per slot
//                 since the last fresh release (capped at w shares) and
//                 nullifies the slots right after a release to pay the debt.
//   UniformPublisher  releases fresh every slot at the per-slot share.
//   PlbuPublisher local randomized response per user per slot at the
//                 per-slot share, with an unbiased server-side estimator.
//
// BD/BA, the non-personalized baselines, are PBD/PBA over a population with
// one common requirement (see make_baseline).

#ifndef PWSM_PUBLISHERS_HPP_
#define PWSM_PUBLISHERS_HPP_

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "pwsm/ledger.hpp"
#include "pwsm/model.hpp"
#include "pwsm/random.hpp"
#include "pwsm/sampling.hpp"

namespace pwsm {

struct PublisherOptions {
  // Global sensitivity of the per-slot count query.
  double sensitivity = 1.0;
  std::uint64_t seed = 0;
  NoiseMode noise = NoiseMode::kStochastic;
};

struct DissimilarityResult {
  double value = 0.0;      // noisy mean absolute bin deviation
  double threshold = 0.0;  // sampling threshold used for the probe
};

// Noisy dissimilarity probe: samples the slot at the threshold picked by
// obs() over `budgets` (with `sensitivity`, the probe's own sensitivity —
// 1/d for the mean absolute deviation), counts, takes the mean absolute
// deviation from `baseline`, and adds Laplace(sensitivity / threshold).
DissimilarityResult dissimilarity(const SlotDatabase& db,
                                  std::span<const double> budgets,
                                  const Histogram& baseline,
                                  double sensitivity, RandomSource& rng);

// Diagnostics from a publisher's most recent step.
struct StepInfo {
  PublicationKind kind = PublicationKind::kFresh;
  // Noisy dissimilarity probe value and its sampling threshold (NaN for
  // mechanisms without a probe, and meaningless when `candidates` is empty).
  double dissimilarity = std::numeric_limits<double>::quiet_NaN();
  double dissimilarity_threshold = std::numeric_limits<double>::quiet_NaN();
  // Per-user budgets offered for a fresh release this slot (empty when the
  // slot was nullified before budgets were formed).
  std::vector<double> candidates;
  // obs() pick over the candidates and its error estimate (NaN when no
  // selection ran).
  double publication_threshold = std::numeric_limits<double>::quiet_NaN();
  double publication_error = std::numeric_limits<double>::quiet_NaN();
};

// Common shell: slot continuity and domain checks, release history, budget
// ledger, and the per-step diagnostics.
class Publisher {
 public:
  virtual ~Publisher() = default;

  // Consumes the next slot (slots must arrive consecutively starting at 1)
  // and returns this slot's release.
  const Publication& step(const SlotDatabase& db);

  const std::vector<Publication>& publications() const {
    return publications_;
  }
  const BudgetLedger& ledger() const { return ledger_; }
  const std::vector<PrivacyRequirement>& requirements() const {
    return ledger_.requirements();
  }
  const StepInfo& last_step() const { return info_; }
  const PublisherOptions& options() const { return options_; }

 protected:
  Publisher(std::vector<PrivacyRequirement> requirements,
            PublisherOptions options);

  virtual Publication do_step(const SlotDatabase& db) = 0;

  std::uint32_t user_count() const { return ledger_.user_count(); }
  // Bins of the previous slot's release (all-zero baseline before slot 1).
  const Histogram& previous_release() const { return previous_release_; }

  BudgetLedger ledger_;
  PublisherOptions options_;
  RandomSource rng_;
  StepInfo info_;

 private:
  std::vector<Publication> publications_;
  Histogram previous_release_;
  std::uint32_t domain_size_ = 0;
};

// Budget distribution: every slot spends half-shares on the dissimilarity
// probe, offers half of each user's unspent in-window publication budget,
// and releases fresh only when the probe exceeds the error estimate of the
// release itself.
class PbdPublisher : public Publisher {
 public:
  PbdPublisher(std::vector<PrivacyRequirement> requirements,
               PublisherOptions options);

 protected:
  Publication do_step(const SlotDatabase& db) override;

 private:
  std::vector<double> half_shares_;
  // Per-user publication charges by slot (index 0 unused) and the running
  // window sum over slots [t - w + 1, t - 1].
  std::vector<std::vector<double>> publication_charges_;
  std::vector<double> window_sums_;
  Histogram last_fresh_;
  std::int64_t last_fresh_slot_ = 0;
};

// Budget absorption: publication budget grows by one half-share per slot
// since the last fresh release (capped at w shares, i.e. budget/2). A fresh
// release that spent k shares nullifies the next k-1 slots to repay them;
// skipped slots donate their shares to the next release.
class PbaPublisher : public Publisher {
 public:
  PbaPublisher(std::vector<PrivacyRequirement> requirements,
               PublisherOptions options);

 protected:
  Publication do_step(const SlotDatabase& db) override;

 private:
  std::vector<double> half_shares_;
  // Shares charged at the last fresh release; 1 before any release so that
  // no nullified debt is owed at the start.
  std::vector<std::int64_t> last_fresh_shares_;
  Histogram last_fresh_;
  std::int64_t last_fresh_slot_ = 0;
};

// Fresh release every slot at the per-slot share, sampled and perturbed at
// the obs() threshold over the shares. No dissimilarity probe; the whole
// share is charged as publication spend.
class UniformPublisher : public Publisher {
 public:
  UniformPublisher(std::vector<PrivacyRequirement> requirements,
                   PublisherOptions options);

 protected:
  Publication do_step(const SlotDatabase& db) override;

 private:
  std::vector<double> shares_;
  ObsResult selection_;
};

// Local alternative: each present user randomizes their own category with
// d-ary randomized response at their per-slot share; the server publishes
// the standard unbiased frequency estimate. Fresh every slot.
class PlbuPublisher : public Publisher {
 public:
  PlbuPublisher(std::vector<PrivacyRequirement> requirements,
                PublisherOptions options);

 protected:
  Publication do_step(const SlotDatabase& db) override;

 private:
  std::vector<double> shares_;
  double min_share_ = 0.0;
  // Lazily sized to the domain on the first slot.
  std::vector<double> keep_probability_;
  std::vector<double> lie_probability_;
  std::vector<double> inverse_gap_;  // 1 / (keep - lie)
};

enum class BaselineKind { kBd, kBa };

// Non-personalized baselines: PBD (kBd) or PBA (kBa) over a population of
// `user_count` identical (window, epsilon) requirements. With equal
// requirements the personalized mechanisms reduce to their non-personalized
// ancestors, so this is definitional, not an approximation.
std::unique_ptr<Publisher> make_baseline(BaselineKind kind,
                                         std::int32_t window, double epsilon,
                                         std::uint32_t user_count,
                                         PublisherOptions options);

// Sum of 1/k^2 for k = 1..x (0 for x <= 0).
double square_harmonic(std::int64_t x);

// A priori per-slot error cap for PbdPublisher under steady conditions: at
// most `window_publications` fresh releases fall in any span of the
// shortest window, each repaying evenly, and `strongest_count` users
// declare the largest per-slot share (no one is sampled away when every
// user does). Combines the probe's selection error with the geometric decay
// of halving publication budgets.
double pbd_error_bound(std::span<const PrivacyRequirement> requirements,
                       std::uint32_t domain_size,
                       std::int64_t window_publications,
                       std::uint32_t strongest_count);

// A priori per-slot error cap for PbaPublisher: `mean_skips` slots are
// skipped before each fresh release (each donating a share) and as many are
// nullified after it, with `nullified_error` the mean squared error
// observed on nullified slots. `capped_min`/`capped_max` bound the
// publication budget once absorption hits the window cap (budget/2); they
// are only read when mean_skips exceeds the shortest window.
double pba_error_bound(std::span<const PrivacyRequirement> requirements,
                       std::uint32_t domain_size, std::int64_t mean_skips,
                       double nullified_error, double capped_min,
                       double capped_max, std::uint32_t strongest_count);

}  // namespace pwsm

#endif  // PWSM_PUBLISHERS_HPP_
