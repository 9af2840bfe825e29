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

#include "pwsm/ledger.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "csv_util.hpp"

namespace pwsm {

std::string_view phase_name(Phase phase) {
  return phase == Phase::kDc ? "DC" : "NOP";
}

BudgetLedger::BudgetLedger(std::vector<PrivacyRequirement> requirements)
    : requirements_(std::move(requirements)) {
  validate_requirements(requirements_);
  by_user_.resize(requirements_.size());
}

void BudgetLedger::charge(std::uint32_t user, std::int64_t slot, Phase phase,
                          double amount) {
  if (user >= requirements_.size()) {
    throw std::invalid_argument("invalid user index");
  }
  if (slot < 1) {
    throw std::invalid_argument("invalid slot: must be >= 1");
  }
  if (!std::isfinite(amount) || amount < 0.0) {
    throw std::invalid_argument(
        "invalid amount: must be non-negative and finite");
  }
  auto& index = by_user_[user];
  if (!index.empty()) {
    const std::int64_t last_slot = charges_[index.back()].slot;
    if (slot < last_slot) {
      throw std::invalid_argument(
          "invalid slot: charges must be recorded in slot order per user");
    }
    if (slot == last_slot) {
      // Walk the (at most two) charges already at this slot.
      for (auto it = index.rbegin();
           it != index.rend() && charges_[*it].slot == slot; ++it) {
        if (charges_[*it].phase == phase) {
          throw std::invalid_argument(
              "double charge: one charge per user, slot, and phase");
        }
      }
    }
  }
  index.push_back(static_cast<std::uint32_t>(charges_.size()));
  charges_.push_back(BudgetCharge{user, slot, phase, amount});
}

double BudgetLedger::window_sum_impl(std::uint32_t user, std::int64_t slot,
                                     const Phase* phase) const {
  if (user >= requirements_.size()) {
    throw std::invalid_argument("invalid user index");
  }
  if (slot < 1) {
    throw std::invalid_argument("invalid slot: must be >= 1");
  }
  const std::int64_t window = requirements_[user].window();
  const std::int64_t low = std::max<std::int64_t>(slot - window + 1, 1);
  const auto& index = by_user_[user];
  auto begin = std::lower_bound(
      index.begin(), index.end(), low,
      [this](std::uint32_t i, std::int64_t s) { return charges_[i].slot < s; });
  double sum = 0.0;
  for (auto it = begin; it != index.end() && charges_[*it].slot <= slot;
       ++it) {
    if (phase == nullptr || charges_[*it].phase == *phase) {
      sum += charges_[*it].amount;
    }
  }
  return sum;
}

double BudgetLedger::window_sum(std::uint32_t user, std::int64_t slot) const {
  return window_sum_impl(user, slot, nullptr);
}

double BudgetLedger::window_sum(std::uint32_t user, std::int64_t slot,
                                Phase phase) const {
  return window_sum_impl(user, slot, &phase);
}

std::vector<BudgetViolation> BudgetLedger::audit(double tolerance) const {
  std::vector<BudgetViolation> violations;
  for (std::uint32_t user = 0; user < requirements_.size(); ++user) {
    const auto& index = by_user_[user];
    const std::int64_t window = requirements_[user].window();
    const double budget = requirements_[user].budget();
    // Slide over this user's charges. A window sum only grows when a charge
    // lands, so checking each charged slot (after ingesting all charges at
    // that slot) covers every window.
    double sum = 0.0;
    std::size_t tail = 0;  // first position still inside the window
    std::size_t head = 0;
    while (head < index.size()) {
      const std::int64_t slot = charges_[index[head]].slot;
      while (head < index.size() && charges_[index[head]].slot == slot) {
        sum += charges_[index[head]].amount;
        ++head;
      }
      while (tail < head && charges_[index[tail]].slot <= slot - window) {
        sum -= charges_[index[tail]].amount;
        ++tail;
      }
      if (sum > budget + tolerance) {
        violations.push_back(BudgetViolation{user, slot, sum, budget});
      }
    }
  }
  return violations;
}

namespace {

bool is_header(const std::vector<std::string_view>& fields,
               std::string_view first) {
  return !fields.empty() && fields[0] == first;
}

}  // namespace

NamedRequirements read_requirements_csv(const std::string& path) {
  csv::LineReader reader(path);
  NamedRequirements named;
  std::unordered_map<std::string, std::uint32_t> seen;
  std::string line;
  while (reader.next(line)) {
    if (csv::trim(line).empty()) {
      continue;
    }
    const auto fields = csv::split(line);
    if (reader.line_number() == 1 && is_header(fields, "user_id")) {
      continue;
    }
    if (fields.size() != 3) {
      csv::fail_line(path, reader.line_number(),
                     "expected user_id,window,epsilon");
    }
    std::string id(fields[0]);
    if (id.empty()) {
      csv::fail_line(path, reader.line_number(), "empty user id");
    }
    if (!seen.emplace(id, named.requirements.size()).second) {
      csv::fail_line(path, reader.line_number(), "duplicate user id '" + id +
                                                     "'");
    }
    const std::int64_t window =
        csv::parse_int(fields[1], path, reader.line_number());
    const double epsilon =
        csv::parse_double(fields[2], path, reader.line_number());
    try {
      named.requirements.emplace_back(
          static_cast<std::uint32_t>(named.requirements.size()),
          static_cast<std::int32_t>(window), epsilon);
    } catch (const std::invalid_argument& e) {
      csv::fail_line(path, reader.line_number(), e.what());
    }
    named.user_names.push_back(std::move(id));
  }
  return named;
}

BudgetLedger read_ledger_csv(const std::string& path,
                             const NamedRequirements& named) {
  std::unordered_map<std::string_view, std::uint32_t> ids;
  for (std::uint32_t i = 0; i < named.user_names.size(); ++i) {
    ids.emplace(named.user_names[i], i);
  }
  BudgetLedger ledger(named.requirements);
  csv::LineReader reader(path);
  std::string line;
  while (reader.next(line)) {
    if (csv::trim(line).empty()) {
      continue;
    }
    const auto fields = csv::split(line);
    if (reader.line_number() == 1 && is_header(fields, "user_id")) {
      continue;
    }
    if (fields.size() != 4) {
      csv::fail_line(path, reader.line_number(),
                     "expected user_id,slot,phase,amount");
    }
    const auto it = ids.find(fields[0]);
    if (it == ids.end()) {
      csv::fail_line(path, reader.line_number(),
                     "unknown user id '" + std::string(fields[0]) + "'");
    }
    const std::int64_t slot =
        csv::parse_int(fields[1], path, reader.line_number());
    Phase phase;
    if (fields[2] == "DC") {
      phase = Phase::kDc;
    } else if (fields[2] == "NOP") {
      phase = Phase::kNop;
    } else {
      csv::fail_line(path, reader.line_number(),
                     "unknown phase '" + std::string(fields[2]) + "'");
    }
    const double amount =
        csv::parse_double(fields[3], path, reader.line_number());
    try {
      ledger.charge(it->second, slot, phase, amount);
    } catch (const std::invalid_argument& e) {
      csv::fail_line(path, reader.line_number(), e.what());
    }
  }
  return ledger;
}

void write_requirements_csv(const NamedRequirements& named,
                            const std::string& path) {
  if (named.user_names.size() != named.requirements.size()) {
    throw std::invalid_argument("invalid names: need one per requirement");
  }
  csv::FileWriter out(path);
  out.line("user_id,window,epsilon");
  for (std::size_t i = 0; i < named.requirements.size(); ++i) {
    const auto& req = named.requirements[i];
    out.line(named.user_names[i] + "," + std::to_string(req.window()) + "," +
             csv::format_double(req.budget()));
  }
  out.close();
}

void write_ledger_csv(const BudgetLedger& ledger,
                      const std::vector<std::string>& user_names,
                      const std::string& path) {
  if (user_names.size() != ledger.user_count()) {
    throw std::invalid_argument("invalid names: need one per user");
  }
  csv::FileWriter out(path);
  out.line("user_id,slot,phase,amount");
  for (const auto& c : ledger.charges()) {
    out.line(user_names[c.user] + "," + std::to_string(c.slot) + "," +
             std::string(phase_name(c.phase)) + "," +
             csv::format_double(c.amount));
  }
  out.close();
}

}  // namespace pwsm
