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
// Runtime privacy-budget accounting. Mechanisms record every per-user spend
// here; the audit answers, from the record alone, whether any user's
// sliding-window budget was ever exceeded.

#ifndef PWSM_LEDGER_HPP_
#define PWSM_LEDGER_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pwsm/model.hpp"

namespace pwsm {

// Which half of a slot's work a charge pays for: the dissimilarity probe
// (DC) or a new obfuscated publication (NOP).
enum class Phase : std::uint8_t { kDc, kNop };

std::string_view phase_name(Phase phase);

struct BudgetCharge {
  std::uint32_t user;
  std::int64_t slot;
  Phase phase;
  double amount;

  friend bool operator==(const BudgetCharge&, const BudgetCharge&) = default;
};

// One sliding-window budget breach found by the audit.
struct BudgetViolation {
  std::uint32_t user;
  std::int64_t slot;     // the window ending at this slot breached
  double window_spend;   // total spend inside that window
  double budget;         // the user's declared budget

  double overshoot() const { return window_spend - budget; }
};

// Append-only record of per-user privacy spends. Slots are non-decreasing
// per user and at most one charge may exist per (user, slot, phase).
class BudgetLedger {
 public:
  explicit BudgetLedger(std::vector<PrivacyRequirement> requirements);

  void charge(std::uint32_t user, std::int64_t slot, Phase phase,
              double amount);

  // Total spend charged to `user` over the window of their requirement
  // ending at `slot` (slots max(slot - w + 1, 1) .. slot), optionally
  // restricted to one phase.
  double window_sum(std::uint32_t user, std::int64_t slot) const;
  double window_sum(std::uint32_t user, std::int64_t slot, Phase phase) const;

  // Scans every user's every charged window and returns all breaches of
  // window_spend > budget + tolerance, ordered by (user, slot).
  std::vector<BudgetViolation> audit(double tolerance = 1e-9) const;

  const std::vector<BudgetCharge>& charges() const { return charges_; }
  const std::vector<PrivacyRequirement>& requirements() const {
    return requirements_;
  }
  std::uint32_t user_count() const {
    return static_cast<std::uint32_t>(requirements_.size());
  }

  friend bool operator==(const BudgetLedger&, const BudgetLedger&) = default;

 private:
  double window_sum_impl(std::uint32_t user, std::int64_t slot,
                         const Phase* phase) const;

  std::vector<PrivacyRequirement> requirements_;
  std::vector<BudgetCharge> charges_;
  // Per-user positions into charges_, ascending by slot.
  std::vector<std::vector<std::uint32_t>> by_user_;
};

// CSV exchange format.
//
// Requirements files hold `user_id,window,epsilon` rows; charge files hold
// `user_id,slot,phase,amount` rows with phase DC or NOP. A first line equal
// to the column names is treated as a header. User ids are arbitrary
// comma-free strings; they are mapped to dense indices in order of first
// appearance in the requirements file.
struct NamedRequirements {
  std::vector<PrivacyRequirement> requirements;
  std::vector<std::string> user_names;
};

NamedRequirements read_requirements_csv(const std::string& path);
BudgetLedger read_ledger_csv(const std::string& path,
                             const NamedRequirements& named);
void write_requirements_csv(const NamedRequirements& named,
                            const std::string& path);
void write_ledger_csv(const BudgetLedger& ledger,
                      const std::vector<std::string>& user_names,
                      const std::string& path);

}  // namespace pwsm

#endif  // PWSM_LEDGER_HPP_
