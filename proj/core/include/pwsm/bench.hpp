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
// Experiment harness: a flat key=value configuration describes a dataset,
// a set of mechanisms, epsilon/window sweep grids, and a requirement
// model; run_experiment() runs every (mechanism x grid point x repetition)
// cell, audits each ledger, and writes per-cell results plus per-cell
// aggregates as CSV. Every cell's randomness is derived from the master
// seed, so runs are reproducible and cells can run in parallel.

#ifndef PWSM_BENCH_HPP_
#define PWSM_BENCH_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pwsm/model.hpp"
#include "pwsm/random.hpp"
#include "pwsm/streams.hpp"

namespace pwsm {

enum class Mechanism { kPbd, kPba, kBd, kBa, kUniform, kPlbu };

inline constexpr Mechanism kAllMechanisms[] = {
    Mechanism::kPbd, Mechanism::kPba,     Mechanism::kBd,
    Mechanism::kBa,  Mechanism::kUniform, Mechanism::kPlbu,
};

std::string_view mechanism_name(Mechanism mechanism);
Mechanism parse_mechanism(std::string_view name);

enum class StreamKind { kTlns, kSin, kLog, kCsv };

std::string_view stream_kind_name(StreamKind kind);
StreamKind parse_stream_kind(std::string_view name);

struct DatasetSpec {
  StreamKind kind = StreamKind::kSin;
  // Synthetic kinds only; CSV datasets take both from the file.
  std::uint32_t n_users = 1000;
  std::int64_t t_slots = 2000;
  TlnsParams tlns;
  SinParams sin;
  LogParams log;
  // CSV kind only.
  std::string path;
  DomainSpec domain = CategoricalDomain{2};
};

// A requirement-model parameter: either a number or a placeholder bound to
// the sweep grids ("eps" resolves to the cell's epsilon, "w" to the cell's
// window), so one config can sweep personalized requirements.
struct ModelValue {
  enum class Kind { kLiteral, kGridEpsilon, kGridWindow };

  Kind kind = Kind::kLiteral;
  double literal = 0.0;

  static ModelValue number(double value) {
    return ModelValue{Kind::kLiteral, value};
  }
  static ModelValue grid_epsilon() {
    return ModelValue{Kind::kGridEpsilon, 0.0};
  }
  static ModelValue grid_window() { return ModelValue{Kind::kGridWindow, 0.0}; }
  // "eps", "w", or a number.
  static ModelValue parse(std::string_view text);

  friend bool operator==(const ModelValue&, const ModelValue&) = default;
};

// Everyone gets the same (window, epsilon); defaults follow the grids.
struct UniformModel {
  ModelValue window = ModelValue::grid_window();
  ModelValue epsilon = ModelValue::grid_epsilon();
};

// round(ratio * n) users get (window_a, epsilon_a), the rest (window_b,
// epsilon_b), in shuffled order.
struct TwoPointModel {
  ModelValue window_a = ModelValue::number(10);
  ModelValue epsilon_a = ModelValue::number(0.5);
  ModelValue window_b = ModelValue::number(20);
  ModelValue epsilon_b = ModelValue::number(1.0);
  double ratio = 0.5;
};

struct RequirementModel {
  enum class Kind { kUniform, kTwoPoint };

  Kind kind = Kind::kUniform;
  UniformModel uniform;
  TwoPointModel two_point;
};

struct ResolvedUniform {
  std::int32_t window = 0;
  double epsilon = 0.0;
};

struct ResolvedTwoPoint {
  std::int32_t window_a = 0;
  double epsilon_a = 0.0;
  std::int32_t window_b = 0;
  double epsilon_b = 0.0;
  double ratio = 0.0;
};

ResolvedUniform resolve(const UniformModel& model, double epsilon,
                        std::int32_t window);
ResolvedTwoPoint resolve(const TwoPointModel& model, double epsilon,
                         std::int32_t window);

std::vector<PrivacyRequirement> assign_requirements(const ResolvedUniform& model,
                                                    std::uint32_t n_users);
std::vector<PrivacyRequirement> assign_requirements(
    const ResolvedTwoPoint& model, std::uint32_t n_users, RandomSource& rng);
// Dispatches on the model kind after resolving grid placeholders.
std::vector<PrivacyRequirement> assign_requirements(
    const RequirementModel& model, double epsilon, std::int32_t window,
    std::uint32_t n_users, RandomSource& rng);

// The single strictest requirement a non-personalized baseline must honor:
// the largest window paired with the smallest budget in the population.
struct BaselineRequirement {
  std::int32_t window = 0;
  double epsilon = 0.0;
};

BaselineRequirement baseline_requirement(const ResolvedUniform& model);
BaselineRequirement baseline_requirement(const ResolvedTwoPoint& model);
BaselineRequirement baseline_requirement(const RequirementModel& model,
                                         double epsilon, std::int32_t window);

struct ExperimentConfig {
  DatasetSpec dataset;
  std::vector<Mechanism> mechanisms{std::begin(kAllMechanisms),
                                    std::end(kAllMechanisms)};
  std::vector<double> epsilon_grid = {0.6};
  std::vector<std::int32_t> window_grid = {120};
  RequirementModel model;
  std::int32_t repetitions = 10;
  std::uint64_t master_seed = 0;
  std::string output_dir = ".";
  bool zero_noise = false;
};

// Flat `key = value` lines; '#' starts a comment; lists are
// comma-separated. Unknown or duplicate keys are errors. See the config
// schema in the README for the key set.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);
void validate_config(const ExperimentConfig& config);

// Per-cell seeds derived from the master seed. Stream and assignment seeds
// do not depend on the mechanism, so mechanisms compete on identical
// streams and identical requirement assignments within a cell.
struct CellSeeds {
  std::uint64_t stream = 0;
  std::uint64_t assignment = 0;
  std::uint64_t publisher = 0;
};

CellSeeds derive_cell_seeds(std::uint64_t master_seed, Mechanism mechanism,
                            double epsilon, std::int32_t window,
                            std::int32_t repetition);

// Materializes a synthetic dataset. CSV datasets are read with ingest_csv
// instead, once per run.
std::vector<SlotDatabase> build_stream(const DatasetSpec& dataset,
                                       std::uint64_t stream_seed,
                                       NoiseMode noise);

struct ResultRow {
  Mechanism mechanism = Mechanism::kPbd;
  double epsilon = 0.0;
  std::int32_t window = 0;
  double ratio = 1.0;  // 1 under the uniform requirement model
  std::int32_t repetition = 1;
  std::uint64_t seed = 0;  // publisher seed for the cell
  double amre = 0.0;
  double ajsd = 0.0;
  double runtime_ms = 0.0;
  bool audit_ok = true;
};

struct SummaryRow {
  Mechanism mechanism = Mechanism::kPbd;
  double epsilon = 0.0;
  std::int32_t window = 0;
  double ratio = 1.0;
  double median_amre = 0.0;
  double mean_amre = 0.0;
  double ln_mean_amre = 0.0;
  double median_ajsd = 0.0;
  double mean_ajsd = 0.0;
  double ln_mean_ajsd = 0.0;
};

// Middle element, or the mean of the middle pair for even counts.
double median(std::vector<double> values);

// Per (mechanism, epsilon, window, ratio) group, in first-appearance order.
std::vector<SummaryRow> summarize(std::span<const ResultRow> rows);

void write_results_csv(std::span<const ResultRow> rows,
                       const std::string& path);
void write_summary_csv(std::span<const SummaryRow> rows,
                       const std::string& path);

struct RunOutcome {
  std::vector<ResultRow> rows;
  std::vector<SummaryRow> summary;
  std::string results_path;
  std::string summary_path;
  bool all_audits_ok = true;
};

// Runs every cell (mechanisms x epsilon grid x window grid x repetitions),
// writes <output_dir>/results.csv and <output_dir>/summary.csv, and reports
// whether every cell's ledger passed its audit. `jobs` caps the number of
// worker threads; cells are independent and the output does not depend on
// the thread count (runtime_ms aside).
RunOutcome run_experiment(const ExperimentConfig& config, int jobs = 1);

}  // namespace pwsm

#endif  // PWSM_BENCH_HPP_
