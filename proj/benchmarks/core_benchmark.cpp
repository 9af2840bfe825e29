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
// Microbenchmarks for the hot paths: threshold selection, slot stepping of
// the sliding-window publishers, counting, noise draws, and metrics.

#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "pwsm/metrics.hpp"
#include "pwsm/model.hpp"
#include "pwsm/publishers.hpp"
#include "pwsm/random.hpp"
#include "pwsm/sampling.hpp"
#include "pwsm/streams.hpp"

namespace {

pwsm::BudgetGroups random_groups(std::int64_t distinct, pwsm::RandomSource& rng) {
  std::vector<double> budgets;
  for (std::int64_t i = 0; i < distinct; ++i) {
    const double budget = 0.05 + 0.95 * rng.next_double();
    const std::uint32_t copies = 1 + rng.uniform_int(20);
    for (std::uint32_t c = 0; c < copies; ++c) budgets.push_back(budget);
  }
  return pwsm::build_budget_groups(budgets);
}

void BM_ThresholdSelection(benchmark::State& state) {
  pwsm::RandomSource rng(7);
  const pwsm::BudgetGroups groups = random_groups(state.range(0), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pwsm::obs(groups));
  }
}
BENCHMARK(BM_ThresholdSelection)->Arg(2)->Arg(16)->Arg(128);

void BM_CountQuery(benchmark::State& state) {
  pwsm::RandomSource rng(11);
  const auto slots =
      pwsm::gen_sin(static_cast<std::uint32_t>(state.range(0)), 1,
                    pwsm::SinParams{}, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pwsm::count_query(slots[0]));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CountQuery)->Arg(1000)->Arg(10000);

void BM_LaplaceDraw(benchmark::State& state) {
  pwsm::RandomSource rng(13);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rng.laplace(2.5));
  }
}
BENCHMARK(BM_LaplaceDraw);

template <typename PublisherType>
void run_publisher(benchmark::State& state) {
  const auto n_users = static_cast<std::uint32_t>(state.range(0));
  constexpr std::int64_t kSlots = 200;
  pwsm::RandomSource stream_rng(17);
  const auto slots =
      pwsm::gen_sin(n_users, kSlots, pwsm::SinParams{}, stream_rng);
  std::vector<pwsm::PrivacyRequirement> requirements;
  requirements.reserve(n_users);
  for (std::uint32_t user = 0; user < n_users; ++user) {
    requirements.emplace_back(user, 40, user % 2 == 0 ? 0.5 : 1.0);
  }
  pwsm::PublisherOptions options;
  options.seed = 23;
  for (auto _ : state) {
    PublisherType publisher(requirements, options);
    for (const pwsm::SlotDatabase& db : slots) publisher.step(db);
    benchmark::DoNotOptimize(publisher.publications().size());
  }
  state.SetItemsProcessed(state.iterations() * kSlots);
}

void BM_PbdRun(benchmark::State& state) {
  run_publisher<pwsm::PbdPublisher>(state);
}
BENCHMARK(BM_PbdRun)->Arg(100)->Arg(1000);

void BM_PbaRun(benchmark::State& state) {
  run_publisher<pwsm::PbaPublisher>(state);
}
BENCHMARK(BM_PbaRun)->Arg(100)->Arg(1000);

void BM_Amre(benchmark::State& state) {
  std::vector<pwsm::Histogram> released;
  std::vector<pwsm::Histogram> truth;
  pwsm::RandomSource rng(29);
  for (int i = 0; i < 1000; ++i) {
    const double count = std::floor(500.0 * rng.next_double());
    truth.push_back(pwsm::Histogram::exact({count, 500.0 - count}));
    released.push_back(
        pwsm::Histogram::perturbed({count + rng.laplace(3.0),
                                    500.0 - count + rng.laplace(3.0)}));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(pwsm::amre(released, truth));
  }
}
BENCHMARK(BM_Amre);

}  // namespace

BENCHMARK_MAIN();
