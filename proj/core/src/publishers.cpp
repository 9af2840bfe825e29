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

#include "pwsm/publishers.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace pwsm {
namespace {

std::vector<double> collect_positive(std::span<const double> values) {
  std::vector<double> positive;
  positive.reserve(values.size());
  for (double v : values) {
    if (v > 0.0) {
      positive.push_back(v);
    }
  }
  return positive;
}

std::vector<PrivacyRequirement> uniform_population(std::int32_t window,
                                                   double epsilon,
                                                   std::uint32_t user_count) {
  std::vector<PrivacyRequirement> requirements;
  requirements.reserve(user_count);
  for (std::uint32_t i = 0; i < user_count; ++i) {
    requirements.emplace_back(i, window, epsilon);
  }
  return requirements;
}

}  // namespace

DissimilarityResult dissimilarity(const SlotDatabase& db,
                                  std::span<const double> budgets,
                                  const Histogram& baseline,
                                  double sensitivity, RandomSource& rng) {
  if (baseline.size() != db.domain_size()) {
    throw std::invalid_argument("baseline does not match the domain size");
  }
  const ObsResult selection = obs(build_budget_groups(budgets), sensitivity);
  const SlotDatabase sampled =
      sample_database(db, budgets, selection.threshold, rng);
  const Histogram counts = count_query(sampled);
  double deviation = 0.0;
  for (std::uint32_t j = 0; j < counts.size(); ++j) {
    deviation += std::abs(counts.bins()[j] - baseline.bins()[j]);
  }
  deviation /= static_cast<double>(db.domain_size());
  return DissimilarityResult{
      deviation + rng.laplace(sensitivity / selection.threshold),
      selection.threshold};
}

Publisher::Publisher(std::vector<PrivacyRequirement> requirements,
                     PublisherOptions options)
    : ledger_(std::move(requirements)),
      options_(options),
      rng_(options.seed, options.noise),
      previous_release_(Histogram::zeros(0)) {
  if (!std::isfinite(options_.sensitivity) || options_.sensitivity <= 0.0) {
    throw std::invalid_argument(
        "invalid sensitivity: must be positive and finite");
  }
}

const Publication& Publisher::step(const SlotDatabase& db) {
  const std::int64_t expected =
      static_cast<std::int64_t>(publications_.size()) + 1;
  if (db.slot() != expected) {
    throw std::invalid_argument(
        "slot discontinuity: expected slot " + std::to_string(expected) +
        ", got " + std::to_string(db.slot()));
  }
  if (db.user_count() != user_count()) {
    throw std::invalid_argument("user count does not match the population");
  }
  if (publications_.empty()) {
    domain_size_ = db.domain_size();
    previous_release_ = Histogram::zeros(domain_size_);
  } else if (db.domain_size() != domain_size_) {
    throw std::invalid_argument("domain size changed mid-stream");
  }
  info_ = StepInfo{};
  Publication release = do_step(db);
  info_.kind = release.kind();
  previous_release_ = release.histogram();
  publications_.push_back(std::move(release));
  return publications_.back();
}

PbdPublisher::PbdPublisher(std::vector<PrivacyRequirement> requirements,
                           PublisherOptions options)
    : Publisher(std::move(requirements), options),
      last_fresh_(Histogram::zeros(0)) {
  half_shares_.reserve(user_count());
  for (const auto& req : this->requirements()) {
    half_shares_.push_back(req.half_share());
  }
  // Index 0 is a placeholder so per-slot charges live at their slot index.
  publication_charges_.assign(user_count(), std::vector<double>{0.0});
  window_sums_.assign(user_count(), 0.0);
}

Publication PbdPublisher::do_step(const SlotDatabase& db) {
  const std::int64_t t = db.slot();
  const std::uint32_t n = user_count();
  const std::uint32_t d = db.domain_size();
  if (last_fresh_.size() != d) {
    last_fresh_ = Histogram::zeros(d);
  }

  // Dissimilarity phase: everyone pays half a share, every slot.
  for (std::uint32_t i = 0; i < n; ++i) {
    ledger_.charge(i, t, Phase::kDc, half_shares_[i]);
  }
  const DissimilarityResult probe =
      dissimilarity(db, half_shares_, last_fresh_, 1.0 / d, rng_);
  info_.dissimilarity = probe.value;
  info_.dissimilarity_threshold = probe.threshold;

  // Publication phase: offer half of what is still unspent in each window.
  std::vector<double> candidates(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const double remaining =
        requirements()[i].budget() / 2.0 - window_sums_[i];
    candidates[i] = std::max(remaining, 0.0) / 2.0;
  }
  info_.candidates = candidates;

  std::optional<Publication> release;
  const std::vector<double> positive = collect_positive(candidates);
  if (!positive.empty()) {
    const ObsResult selection =
        obs(build_budget_groups(positive), options_.sensitivity);
    info_.publication_threshold = selection.threshold;
    info_.publication_error = selection.error;
    if (probe.value > std::sqrt(selection.error)) {
      const SlotDatabase sampled =
          sample_database(db, candidates, selection.threshold, rng_);
      Histogram released = perturb_histogram(
          count_query(sampled), selection.threshold, options_.sensitivity,
          rng_);
      release = Publication::fresh(t, std::move(released),
                                   selection.threshold);
    }
  }
  const bool fresh = release.has_value();
  if (!fresh) {
    release = Publication::approximated(t, previous_release(), t - 1);
  }

  for (std::uint32_t i = 0; i < n; ++i) {
    const double amount = fresh ? candidates[i] : 0.0;
    ledger_.charge(i, t, Phase::kNop, amount);
    publication_charges_[i].push_back(amount);
    // Advance the window sum to cover [t + 1 - w, t]: slot t enters, slot
    // t - w + 1 leaves.
    window_sums_[i] += amount;
    const std::int64_t leaving = t - requirements()[i].window() + 1;
    if (leaving >= 1) {
      window_sums_[i] -=
          publication_charges_[i][static_cast<std::size_t>(leaving)];
    }
  }
  if (fresh) {
    last_fresh_ = release->histogram();
    last_fresh_slot_ = t;
  }
  return std::move(*release);
}

PbaPublisher::PbaPublisher(std::vector<PrivacyRequirement> requirements,
                           PublisherOptions options)
    : Publisher(std::move(requirements), options),
      last_fresh_(Histogram::zeros(0)) {
  half_shares_.reserve(user_count());
  for (const auto& req : this->requirements()) {
    half_shares_.push_back(req.half_share());
  }
  last_fresh_shares_.assign(user_count(), 1);
}

Publication PbaPublisher::do_step(const SlotDatabase& db) {
  const std::int64_t t = db.slot();
  const std::uint32_t n = user_count();
  const std::uint32_t d = db.domain_size();
  if (last_fresh_.size() != d) {
    last_fresh_ = Histogram::zeros(d);
  }

  // Dissimilarity phase runs before the nullification check, so its charge
  // lands on every slot, nullified ones included.
  for (std::uint32_t i = 0; i < n; ++i) {
    ledger_.charge(i, t, Phase::kDc, half_shares_[i]);
  }
  const DissimilarityResult probe =
      dissimilarity(db, half_shares_, last_fresh_, 1.0 / d, rng_);
  info_.dissimilarity = probe.value;
  info_.dissimilarity_threshold = probe.threshold;

  // A release that spent k shares leaves k - 1 slots of debt behind.
  std::int64_t max_debt = 0;
  for (std::int64_t shares : last_fresh_shares_) {
    max_debt = std::max(max_debt, shares - 1);
  }
  const std::int64_t since = t - last_fresh_slot_;

  const auto charge_publication = [&](std::span<const double> amounts) {
    for (std::uint32_t i = 0; i < n; ++i) {
      ledger_.charge(i, t, Phase::kNop,
                     amounts.empty() ? 0.0 : amounts[i]);
    }
  };

  if (since <= max_debt) {
    charge_publication({});
    return Publication::nullified(t, previous_release(), t - 1);
  }

  // Publication phase: one share absorbed per slot beyond each user's own
  // debt, capped at the full window.
  std::vector<double> candidates(n);
  std::vector<std::int64_t> shares(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::int64_t absorbable =
        std::max<std::int64_t>(since - (last_fresh_shares_[i] - 1), 0);
    shares[i] = std::min<std::int64_t>(
        absorbable, static_cast<std::int64_t>(requirements()[i].window()));
    candidates[i] = half_shares_[i] * static_cast<double>(shares[i]);
  }
  info_.candidates = candidates;

  std::optional<Publication> release;
  const std::vector<double> positive = collect_positive(candidates);
  if (!positive.empty()) {
    const ObsResult selection =
        obs(build_budget_groups(positive), options_.sensitivity);
    info_.publication_threshold = selection.threshold;
    info_.publication_error = selection.error;
    if (probe.value > std::sqrt(selection.error)) {
      const SlotDatabase sampled =
          sample_database(db, candidates, selection.threshold, rng_);
      Histogram released = perturb_histogram(
          count_query(sampled), selection.threshold, options_.sensitivity,
          rng_);
      release = Publication::fresh(t, std::move(released),
                                   selection.threshold);
    }
  }
  if (release.has_value()) {
    charge_publication(candidates);
    last_fresh_ = release->histogram();
    last_fresh_slot_ = t;
    last_fresh_shares_ = shares;
  } else {
    charge_publication({});
    release = Publication::approximated(t, previous_release(), t - 1);
  }
  return std::move(*release);
}

UniformPublisher::UniformPublisher(
    std::vector<PrivacyRequirement> requirements, PublisherOptions options)
    : Publisher(std::move(requirements), options) {
  shares_.reserve(user_count());
  for (const auto& req : this->requirements()) {
    shares_.push_back(req.slot_share());
  }
  // Requirements are fixed, so the selection is the same every slot.
  selection_ = obs(build_budget_groups(shares_), options_.sensitivity);
}

Publication UniformPublisher::do_step(const SlotDatabase& db) {
  const std::int64_t t = db.slot();
  for (std::uint32_t i = 0; i < user_count(); ++i) {
    ledger_.charge(i, t, Phase::kNop, shares_[i]);
  }
  const SlotDatabase sampled =
      sample_database(db, shares_, selection_.threshold, rng_);
  Histogram released =
      perturb_histogram(count_query(sampled), selection_.threshold,
                        options_.sensitivity, rng_);
  info_.candidates = shares_;
  info_.publication_threshold = selection_.threshold;
  info_.publication_error = selection_.error;
  return Publication::fresh(t, std::move(released), selection_.threshold);
}

PlbuPublisher::PlbuPublisher(std::vector<PrivacyRequirement> requirements,
                             PublisherOptions options)
    : Publisher(std::move(requirements), options) {
  shares_.reserve(user_count());
  for (const auto& req : this->requirements()) {
    shares_.push_back(req.slot_share());
  }
  min_share_ = *std::min_element(shares_.begin(), shares_.end());
}

Publication PlbuPublisher::do_step(const SlotDatabase& db) {
  const std::int64_t t = db.slot();
  const std::uint32_t n = user_count();
  const std::uint32_t d = db.domain_size();
  if (keep_probability_.empty()) {
    keep_probability_.resize(n);
    lie_probability_.resize(n);
    inverse_gap_.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      const double e = std::exp(shares_[i]);
      keep_probability_[i] = e / (e + d - 1.0);
      lie_probability_[i] = 1.0 / (e + d - 1.0);
      // keep - lie = (e - 1) / (e + d - 1)
      inverse_gap_[i] = (e + d - 1.0) / std::expm1(shares_[i]);
    }
  }

  for (std::uint32_t i = 0; i < n; ++i) {
    ledger_.charge(i, t, Phase::kNop, shares_[i]);
  }

  std::vector<double> bins(d, 0.0);
  double offset = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::int32_t value = db.values()[i];
    if (value == SlotDatabase::kAbsent) {
      continue;
    }
    std::int32_t report = value;
    if (!rng_.bernoulli(keep_probability_[i])) {
      // Uniform among the other d - 1 categories (unreachable for d = 1,
      // where the keep probability is exactly 1).
      const std::uint32_t k = rng_.uniform_int(d - 1);
      report = static_cast<std::int32_t>(k) +
               (static_cast<std::int32_t>(k) >= value ? 1 : 0);
    }
    bins[static_cast<std::size_t>(report)] += inverse_gap_[i];
    offset += lie_probability_[i] * inverse_gap_[i];
  }
  for (double& b : bins) {
    b -= offset;
  }
  info_.candidates = shares_;
  return Publication::fresh(t, Histogram::perturbed(std::move(bins)),
                            min_share_);
}

std::unique_ptr<Publisher> make_baseline(BaselineKind kind,
                                         std::int32_t window, double epsilon,
                                         std::uint32_t user_count,
                                         PublisherOptions options) {
  if (user_count == 0) {
    throw std::invalid_argument("no requirements: population is empty");
  }
  auto requirements = uniform_population(window, epsilon, user_count);
  if (kind == BaselineKind::kBd) {
    return std::make_unique<PbdPublisher>(std::move(requirements), options);
  }
  return std::make_unique<PbaPublisher>(std::move(requirements), options);
}

double square_harmonic(std::int64_t x) {
  double sum = 0.0;
  for (std::int64_t k = 1; k <= x; ++k) {
    sum += 1.0 / (static_cast<double>(k) * static_cast<double>(k));
  }
  return sum;
}

namespace {

struct ShareStats {
  double min_share;
  double max_share;
  double population;  // n
  double zed;         // (n - n_A) * (n - n_A + 1/4)
};

ShareStats share_stats(std::span<const PrivacyRequirement> requirements,
                       std::uint32_t domain_size,
                       std::uint32_t strongest_count) {
  if (requirements.empty()) {
    throw std::invalid_argument("no requirements: cannot bound the error");
  }
  if (domain_size < 1) {
    throw std::invalid_argument("invalid domain size: must be >= 1");
  }
  if (strongest_count < 1 || strongest_count > requirements.size()) {
    throw std::invalid_argument(
        "invalid strongest count: must be in [1, user count]");
  }
  ShareStats stats{requirements[0].slot_share(), requirements[0].slot_share(),
                   static_cast<double>(requirements.size()), 0.0};
  for (const auto& req : requirements) {
    stats.min_share = std::min(stats.min_share, req.slot_share());
    stats.max_share = std::max(stats.max_share, req.slot_share());
  }
  const double dropped = stats.population - strongest_count;
  stats.zed = dropped * (dropped + 0.25);
  return stats;
}

double probe_selection_term(const ShareStats& stats,
                            std::uint32_t domain_size) {
  const double d = static_cast<double>(domain_size);
  const double weakest = 8.0 / (d * d * stats.min_share * stats.min_share);
  const double strongest =
      stats.zed + 8.0 / (d * d * stats.max_share * stats.max_share);
  return std::min(weakest, strongest);
}

}  // namespace

double pbd_error_bound(std::span<const PrivacyRequirement> requirements,
                       std::uint32_t domain_size,
                       std::int64_t window_publications,
                       std::uint32_t strongest_count) {
  if (window_publications < 1) {
    throw std::invalid_argument(
        "invalid publication count: must be >= 1");
  }
  const ShareStats stats =
      share_stats(requirements, domain_size, strongest_count);
  const double probe_term = probe_selection_term(stats, domain_size);
  // Halving budgets decay geometrically; s publications in a window cost at
  // most 32 (4^s - 1) / (3 s) per slot at the weakest rate.
  const double s = static_cast<double>(window_publications);
  const double decay = 32.0 * (std::pow(4.0, s) - 1.0) / (3.0 * s);
  const double weakest = decay / (stats.min_share * stats.min_share);
  const double strongest =
      stats.zed + decay / (stats.max_share * stats.max_share);
  return probe_term + std::min(weakest, strongest);
}

double pba_error_bound(std::span<const PrivacyRequirement> requirements,
                       std::uint32_t domain_size, std::int64_t mean_skips,
                       double nullified_error, double capped_min,
                       double capped_max, std::uint32_t strongest_count) {
  if (mean_skips < 0) {
    throw std::invalid_argument("invalid skip count: must be >= 0");
  }
  if (!std::isfinite(nullified_error) || nullified_error < 0.0) {
    throw std::invalid_argument(
        "invalid nullified error: must be non-negative and finite");
  }
  const ShareStats stats =
      share_stats(requirements, domain_size, strongest_count);
  const double probe_term = probe_selection_term(stats, domain_size);

  std::int64_t shortest_window = requirements[0].window();
  for (const auto& req : requirements) {
    shortest_window =
        std::min<std::int64_t>(shortest_window, req.window());
  }

  const double alpha = static_cast<double>(mean_skips);
  double publication_term;
  if (mean_skips <= shortest_window) {
    // Budgets grow linearly with each skipped slot, so the error of the k-th
    // skip decays as 1/k^2 — a square-harmonic total.
    const double h = square_harmonic(mean_skips + 1);
    publication_term =
        std::min(2.0 * h / (stats.min_share * stats.min_share),
                 (alpha + 1.0) * stats.zed +
                     2.0 * h / (stats.max_share * stats.max_share));
  } else {
    // Absorption saturates at the window cap; past it each further skip is
    // released at the capped budget.
    if (!std::isfinite(capped_min) || capped_min <= 0.0 ||
        !std::isfinite(capped_max) || capped_max <= 0.0) {
      throw std::invalid_argument(
          "invalid capped budget: must be positive and finite");
    }
    const double h = square_harmonic(shortest_window);
    const double w = static_cast<double>(shortest_window);
    publication_term =
        std::min(2.0 * h / (stats.min_share * stats.min_share),
                 w * stats.zed +
                     2.0 * h / (stats.max_share * stats.max_share));
    publication_term +=
        (alpha - w + 1.0) *
        std::min(2.0 / (capped_min * capped_min),
                 stats.zed + 2.0 / (capped_max * capped_max));
  }
  return probe_term +
         (publication_term + alpha * nullified_error) / (2.0 * alpha + 1.0);
}

}  // namespace pwsm
