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

#include "pwsm/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>
#include <utility>

#include "csv_util.hpp"
#include "pwsm/metrics.hpp"
#include "pwsm/publishers.hpp"
#include "pwsm/sampling.hpp"

namespace pwsm {
namespace {

[[noreturn]] void fail_config(std::size_t line, const std::string& what) {
  throw std::runtime_error("config line " + std::to_string(line) + ": " +
                           what);
}

double config_double(std::string_view field, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    fail_config(line, "expected a number, got '" + std::string(field) + "'");
  }
  return value;
}

std::int64_t config_int(std::string_view field, std::size_t line) {
  std::int64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    fail_config(line,
                "expected an integer, got '" + std::string(field) + "'");
  }
  return value;
}

std::uint64_t config_u64(std::string_view field, std::size_t line) {
  std::uint64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    fail_config(line, "expected an unsigned integer, got '" +
                          std::string(field) + "'");
  }
  return value;
}

bool config_bool(std::string_view field, std::size_t line) {
  if (field == "true") return true;
  if (field == "false") return false;
  fail_config(line, "expected true or false, got '" + std::string(field) +
                        "'");
}

double resolve_epsilon_field(const ModelValue& value, double epsilon,
                             const char* field) {
  switch (value.kind) {
    case ModelValue::Kind::kLiteral:
      return value.literal;
    case ModelValue::Kind::kGridEpsilon:
      return epsilon;
    case ModelValue::Kind::kGridWindow:
      break;
  }
  throw std::invalid_argument(std::string("invalid model: ") + field +
                              " cannot be bound to the window grid");
}

std::int32_t resolve_window_field(const ModelValue& value, std::int32_t window,
                                  const char* field) {
  switch (value.kind) {
    case ModelValue::Kind::kGridWindow:
      return window;
    case ModelValue::Kind::kLiteral: {
      const double raw = value.literal;
      if (!(raw >= 1.0) || raw > 2147483647.0 || raw != std::floor(raw)) {
        throw std::invalid_argument(std::string("invalid model: ") + field +
                                    " must be a positive integer");
      }
      return static_cast<std::int32_t>(raw);
    }
    case ModelValue::Kind::kGridEpsilon:
      break;
  }
  throw std::invalid_argument(std::string("invalid model: ") + field +
                              " cannot be bound to the epsilon grid");
}

}  // namespace

std::string_view mechanism_name(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::kPbd:
      return "pbd";
    case Mechanism::kPba:
      return "pba";
    case Mechanism::kBd:
      return "bd";
    case Mechanism::kBa:
      return "ba";
    case Mechanism::kUniform:
      return "uniform";
    case Mechanism::kPlbu:
      return "plbu";
  }
  throw std::invalid_argument("unknown mechanism");
}

Mechanism parse_mechanism(std::string_view name) {
  for (const Mechanism m : kAllMechanisms) {
    if (name == mechanism_name(m)) return m;
  }
  throw std::invalid_argument("unknown mechanism: '" + std::string(name) +
                              "'");
}

std::string_view stream_kind_name(StreamKind kind) {
  switch (kind) {
    case StreamKind::kTlns:
      return "tlns";
    case StreamKind::kSin:
      return "sin";
    case StreamKind::kLog:
      return "log";
    case StreamKind::kCsv:
      return "csv";
  }
  throw std::invalid_argument("unknown stream kind");
}

StreamKind parse_stream_kind(std::string_view name) {
  for (const StreamKind kind : {StreamKind::kTlns, StreamKind::kSin,
                                StreamKind::kLog, StreamKind::kCsv}) {
    if (name == stream_kind_name(kind)) return kind;
  }
  throw std::invalid_argument("unknown stream kind: '" + std::string(name) +
                              "'");
}

ModelValue ModelValue::parse(std::string_view text) {
  text = csv::trim(text);
  if (text == "eps") return grid_epsilon();
  if (text == "w") return grid_window();
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("invalid model value: '" + std::string(text) +
                                "' (expected a number, 'eps', or 'w')");
  }
  return number(value);
}

ResolvedUniform resolve(const UniformModel& model, double epsilon,
                        std::int32_t window) {
  return ResolvedUniform{
      resolve_window_field(model.window, window, "uniform.window"),
      resolve_epsilon_field(model.epsilon, epsilon, "uniform.epsilon")};
}

ResolvedTwoPoint resolve(const TwoPointModel& model, double epsilon,
                         std::int32_t window) {
  return ResolvedTwoPoint{
      resolve_window_field(model.window_a, window, "two_point.window_a"),
      resolve_epsilon_field(model.epsilon_a, epsilon, "two_point.epsilon_a"),
      resolve_window_field(model.window_b, window, "two_point.window_b"),
      resolve_epsilon_field(model.epsilon_b, epsilon, "two_point.epsilon_b"),
      model.ratio};
}

std::vector<PrivacyRequirement> assign_requirements(const ResolvedUniform& model,
                                                    std::uint32_t n_users) {
  if (n_users < 1) {
    throw std::invalid_argument("invalid model: no users to assign");
  }
  std::vector<PrivacyRequirement> requirements;
  requirements.reserve(n_users);
  for (std::uint32_t user = 0; user < n_users; ++user) {
    requirements.emplace_back(user, model.window, model.epsilon);
  }
  return requirements;
}

std::vector<PrivacyRequirement> assign_requirements(
    const ResolvedTwoPoint& model, std::uint32_t n_users, RandomSource& rng) {
  if (n_users < 1) {
    throw std::invalid_argument("invalid model: no users to assign");
  }
  if (!(model.ratio >= 0.0) || !(model.ratio <= 1.0)) {
    throw std::invalid_argument(
        "invalid model: ratio must be within [0, 1]");
  }
  const auto first_group =
      static_cast<std::uint32_t>(std::llround(model.ratio * n_users));
  std::vector<std::uint8_t> in_first(n_users, 0);
  for (std::uint32_t i = 0; i < first_group && i < n_users; ++i) {
    in_first[i] = 1;
  }
  rng.shuffle(in_first);
  std::vector<PrivacyRequirement> requirements;
  requirements.reserve(n_users);
  for (std::uint32_t user = 0; user < n_users; ++user) {
    if (in_first[user] != 0) {
      requirements.emplace_back(user, model.window_a, model.epsilon_a);
    } else {
      requirements.emplace_back(user, model.window_b, model.epsilon_b);
    }
  }
  return requirements;
}

std::vector<PrivacyRequirement> assign_requirements(
    const RequirementModel& model, double epsilon, std::int32_t window,
    std::uint32_t n_users, RandomSource& rng) {
  switch (model.kind) {
    case RequirementModel::Kind::kUniform:
      return assign_requirements(resolve(model.uniform, epsilon, window),
                                 n_users);
    case RequirementModel::Kind::kTwoPoint:
      return assign_requirements(resolve(model.two_point, epsilon, window),
                                 n_users, rng);
  }
  throw std::invalid_argument("invalid model: unknown kind");
}

BaselineRequirement baseline_requirement(const ResolvedUniform& model) {
  return BaselineRequirement{model.window, model.epsilon};
}

BaselineRequirement baseline_requirement(const ResolvedTwoPoint& model) {
  return BaselineRequirement{std::max(model.window_a, model.window_b),
                             std::min(model.epsilon_a, model.epsilon_b)};
}

BaselineRequirement baseline_requirement(const RequirementModel& model,
                                         double epsilon,
                                         std::int32_t window) {
  switch (model.kind) {
    case RequirementModel::Kind::kUniform:
      return baseline_requirement(resolve(model.uniform, epsilon, window));
    case RequirementModel::Kind::kTwoPoint:
      return baseline_requirement(resolve(model.two_point, epsilon, window));
  }
  throw std::invalid_argument("invalid model: unknown kind");
}

namespace {

// Grid-domain staging: `dataset.domain = grid` may appear before or after
// the grid parameters, so the domain is assembled after the last line.
struct ConfigStaging {
  bool domain_is_grid = false;
  bool domain_size_set = false;
  bool grid_params_set = false;
  std::uint32_t domain_size = 2;
  GridSpec grid;
};

void apply_key(ExperimentConfig& config, ConfigStaging& staging,
               std::string_view key, std::string_view value,
               std::size_t line) {
  if (key == "dataset.kind") {
    config.dataset.kind = parse_stream_kind(value);
  } else if (key == "dataset.n_users") {
    const std::int64_t n = config_int(value, line);
    if (n < 1 || n > 0xFFFFFFFFLL) {
      fail_config(line, "dataset.n_users must be a positive 32-bit count");
    }
    config.dataset.n_users = static_cast<std::uint32_t>(n);
  } else if (key == "dataset.t_slots") {
    const std::int64_t t = config_int(value, line);
    if (t < 1) fail_config(line, "dataset.t_slots must be positive");
    config.dataset.t_slots = t;
  } else if (key == "dataset.start") {
    config.dataset.tlns.start = config_double(value, line);
  } else if (key == "dataset.stddev") {
    config.dataset.tlns.stddev = config_double(value, line);
  } else if (key == "dataset.amplitude") {
    const double amplitude = config_double(value, line);
    config.dataset.sin.amplitude = amplitude;
    config.dataset.log.amplitude = amplitude;
  } else if (key == "dataset.omega") {
    config.dataset.sin.omega = config_double(value, line);
  } else if (key == "dataset.offset") {
    config.dataset.sin.offset = config_double(value, line);
  } else if (key == "dataset.rate") {
    config.dataset.log.rate = config_double(value, line);
  } else if (key == "dataset.path") {
    config.dataset.path = std::string(value);
  } else if (key == "dataset.domain") {
    if (value == "category") {
      staging.domain_is_grid = false;
    } else if (value == "grid") {
      staging.domain_is_grid = true;
    } else {
      fail_config(line, "dataset.domain must be category or grid");
    }
  } else if (key == "dataset.domain_size") {
    const std::int64_t d = config_int(value, line);
    if (d < 1 || d > 0xFFFFFFFFLL) {
      fail_config(line, "dataset.domain_size must be a positive 32-bit count");
    }
    staging.domain_size = static_cast<std::uint32_t>(d);
    staging.domain_size_set = true;
  } else if (key == "dataset.grid") {
    const auto fields = csv::split(value);
    if (fields.size() != 6) {
      fail_config(line,
                  "dataset.grid needs 6 values: lon_min, lon_max, lat_min, "
                  "lat_max, cells_x, cells_y");
    }
    staging.grid.lon_min = config_double(fields[0], line);
    staging.grid.lon_max = config_double(fields[1], line);
    staging.grid.lat_min = config_double(fields[2], line);
    staging.grid.lat_max = config_double(fields[3], line);
    const std::int64_t cx = config_int(fields[4], line);
    const std::int64_t cy = config_int(fields[5], line);
    if (cx < 1 || cy < 1 || cx > 0xFFFF || cy > 0xFFFF) {
      fail_config(line, "dataset.grid cell counts must be in [1, 65535]");
    }
    staging.grid.cells_x = static_cast<std::uint32_t>(cx);
    staging.grid.cells_y = static_cast<std::uint32_t>(cy);
    staging.grid_params_set = true;
  } else if (key == "mechanisms") {
    config.mechanisms.clear();
    for (const auto field : csv::split(value)) {
      if (field.empty()) fail_config(line, "empty mechanism name");
      config.mechanisms.push_back(parse_mechanism(field));
    }
  } else if (key == "epsilon_grid") {
    config.epsilon_grid.clear();
    for (const auto field : csv::split(value)) {
      config.epsilon_grid.push_back(config_double(field, line));
    }
  } else if (key == "window_grid") {
    config.window_grid.clear();
    for (const auto field : csv::split(value)) {
      const std::int64_t w = config_int(field, line);
      if (w < 1 || w > 2147483647LL) {
        fail_config(line, "window_grid values must be positive 32-bit");
      }
      config.window_grid.push_back(static_cast<std::int32_t>(w));
    }
  } else if (key == "requirement_model") {
    if (value == "uniform") {
      config.model.kind = RequirementModel::Kind::kUniform;
    } else if (value == "two_point") {
      config.model.kind = RequirementModel::Kind::kTwoPoint;
    } else {
      fail_config(line, "requirement_model must be uniform or two_point");
    }
  } else if (key == "uniform.window") {
    config.model.uniform.window = ModelValue::parse(value);
  } else if (key == "uniform.epsilon") {
    config.model.uniform.epsilon = ModelValue::parse(value);
  } else if (key == "two_point.window_a") {
    config.model.two_point.window_a = ModelValue::parse(value);
  } else if (key == "two_point.epsilon_a") {
    config.model.two_point.epsilon_a = ModelValue::parse(value);
  } else if (key == "two_point.window_b") {
    config.model.two_point.window_b = ModelValue::parse(value);
  } else if (key == "two_point.epsilon_b") {
    config.model.two_point.epsilon_b = ModelValue::parse(value);
  } else if (key == "two_point.ratio") {
    config.model.two_point.ratio = config_double(value, line);
  } else if (key == "repetitions") {
    const std::int64_t r = config_int(value, line);
    if (r < 1 || r > 1000000) {
      fail_config(line, "repetitions must be in [1, 1000000]");
    }
    config.repetitions = static_cast<std::int32_t>(r);
  } else if (key == "master_seed") {
    config.master_seed = config_u64(value, line);
  } else if (key == "output_dir") {
    config.output_dir = std::string(value);
  } else if (key == "zero_noise") {
    config.zero_noise = config_bool(value, line);
  } else {
    fail_config(line, "unknown config key: '" + std::string(key) + "'");
  }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig config;
  ConfigStaging staging;
  std::unordered_set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_number = 0;
  while (std::getline(in, raw)) {
    ++line_number;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = csv::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail_config(line_number, "expected 'key = value'");
    }
    const std::string_view key = csv::trim(line.substr(0, eq));
    const std::string_view value = csv::trim(line.substr(eq + 1));
    if (key.empty()) fail_config(line_number, "empty key");
    if (!seen.insert(std::string(key)).second) {
      fail_config(line_number,
                  "duplicate config key: '" + std::string(key) + "'");
    }
    apply_key(config, staging, key, value, line_number);
  }
  if (staging.domain_is_grid) {
    if (staging.domain_size_set) {
      throw std::runtime_error(
          "config: dataset.domain_size only applies to the category domain");
    }
    config.dataset.domain = staging.grid;
  } else {
    if (staging.grid_params_set) {
      throw std::runtime_error(
          "config: dataset.grid requires dataset.domain = grid");
    }
    config.dataset.domain = CategoricalDomain{staging.domain_size};
  }
  validate_config(config);
  return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
  csv::LineReader reader(path);
  std::string text;
  std::string line;
  while (reader.next(line)) {
    text += line;
    text += '\n';
  }
  return parse_config_text(text);
}

void validate_config(const ExperimentConfig& config) {
  if (config.mechanisms.empty()) {
    throw std::invalid_argument("invalid config: no mechanisms");
  }
  for (std::size_t i = 0; i < config.mechanisms.size(); ++i) {
    for (std::size_t j = i + 1; j < config.mechanisms.size(); ++j) {
      if (config.mechanisms[i] == config.mechanisms[j]) {
        throw std::invalid_argument(
            "invalid config: duplicate mechanism '" +
            std::string(mechanism_name(config.mechanisms[i])) + "'");
      }
    }
  }
  if (config.epsilon_grid.empty()) {
    throw std::invalid_argument("invalid config: empty epsilon_grid");
  }
  for (const double epsilon : config.epsilon_grid) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw std::invalid_argument(
          "invalid config: epsilon_grid values must be positive");
    }
  }
  if (config.window_grid.empty()) {
    throw std::invalid_argument("invalid config: empty window_grid");
  }
  for (const std::int32_t window : config.window_grid) {
    if (window < 1) {
      throw std::invalid_argument(
          "invalid config: window_grid values must be positive");
    }
  }
  if (config.repetitions < 1) {
    throw std::invalid_argument("invalid config: repetitions must be >= 1");
  }
  if (config.model.kind == RequirementModel::Kind::kTwoPoint) {
    const double ratio = config.model.two_point.ratio;
    if (!(ratio >= 0.0) || !(ratio <= 1.0)) {
      throw std::invalid_argument(
          "invalid config: two_point.ratio must be within [0, 1]");
    }
  }
  if (config.dataset.kind == StreamKind::kCsv) {
    if (config.dataset.path.empty()) {
      throw std::invalid_argument(
          "invalid config: dataset.path is required for csv datasets");
    }
  } else {
    if (config.dataset.n_users < 1) {
      throw std::invalid_argument(
          "invalid config: dataset.n_users must be >= 1");
    }
    if (config.dataset.t_slots < 1) {
      throw std::invalid_argument(
          "invalid config: dataset.t_slots must be >= 1");
    }
  }
  if (config.output_dir.empty()) {
    throw std::invalid_argument("invalid config: empty output_dir");
  }
}

CellSeeds derive_cell_seeds(std::uint64_t master_seed, Mechanism mechanism,
                            double epsilon, std::int32_t window,
                            std::int32_t repetition) {
  const std::uint64_t epsilon_bits = double_bits(epsilon);
  const auto window_word = static_cast<std::uint64_t>(window);
  const auto repetition_word = static_cast<std::uint64_t>(repetition);
  CellSeeds seeds;
  seeds.stream = mix_seed(master_seed, {hash_string("stream"), epsilon_bits,
                                        window_word, repetition_word});
  seeds.assignment = mix_seed(master_seed, {hash_string("assign"),
                                            epsilon_bits, window_word,
                                            repetition_word});
  seeds.publisher =
      mix_seed(master_seed, {hash_string(mechanism_name(mechanism)),
                             epsilon_bits, window_word, repetition_word});
  return seeds;
}

std::vector<SlotDatabase> build_stream(const DatasetSpec& dataset,
                                       std::uint64_t stream_seed,
                                       NoiseMode noise) {
  RandomSource rng(stream_seed, noise);
  switch (dataset.kind) {
    case StreamKind::kTlns:
      return gen_tlns(dataset.n_users, dataset.t_slots, dataset.tlns, rng);
    case StreamKind::kSin:
      return gen_sin(dataset.n_users, dataset.t_slots, dataset.sin, rng);
    case StreamKind::kLog:
      return gen_log(dataset.n_users, dataset.t_slots, dataset.log, rng);
    case StreamKind::kCsv:
      break;
  }
  throw std::invalid_argument(
      "csv datasets are read with ingest_csv, not generated");
}

double median(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("median of an empty list");
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<SummaryRow> summarize(std::span<const ResultRow> rows) {
  if (rows.empty()) {
    throw std::invalid_argument("empty results");
  }
  struct Key {
    Mechanism mechanism;
    double epsilon;
    std::int32_t window;
    double ratio;

    bool operator==(const Key&) const = default;
  };
  std::vector<Key> keys;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Key key{rows[i].mechanism, rows[i].epsilon, rows[i].window,
                  rows[i].ratio};
    const auto it = std::find(keys.begin(), keys.end(), key);
    if (it == keys.end()) {
      keys.push_back(key);
      groups.emplace_back();
      groups.back().push_back(i);
    } else {
      groups[static_cast<std::size_t>(it - keys.begin())].push_back(i);
    }
  }
  std::vector<SummaryRow> summary;
  summary.reserve(keys.size());
  for (std::size_t g = 0; g < keys.size(); ++g) {
    std::vector<double> amre_values;
    std::vector<double> ajsd_values;
    amre_values.reserve(groups[g].size());
    ajsd_values.reserve(groups[g].size());
    double amre_sum = 0.0;
    double ajsd_sum = 0.0;
    for (const std::size_t i : groups[g]) {
      amre_values.push_back(rows[i].amre);
      ajsd_values.push_back(rows[i].ajsd);
      amre_sum += rows[i].amre;
      ajsd_sum += rows[i].ajsd;
    }
    const auto count = static_cast<double>(groups[g].size());
    SummaryRow row;
    row.mechanism = keys[g].mechanism;
    row.epsilon = keys[g].epsilon;
    row.window = keys[g].window;
    row.ratio = keys[g].ratio;
    row.median_amre = median(std::move(amre_values));
    row.mean_amre = amre_sum / count;
    row.ln_mean_amre = std::log(row.mean_amre);
    row.median_ajsd = median(std::move(ajsd_values));
    row.mean_ajsd = ajsd_sum / count;
    row.ln_mean_ajsd = std::log(row.mean_ajsd);
    summary.push_back(row);
  }
  return summary;
}

void write_results_csv(std::span<const ResultRow> rows,
                       const std::string& path) {
  csv::FileWriter out(path);
  out.line("mechanism,epsilon,window,ratio,repetition,seed,amre,ajsd,"
           "runtime_ms,audit_ok");
  for (const ResultRow& row : rows) {
    std::string text;
    text += mechanism_name(row.mechanism);
    text += ',';
    text += csv::format_double(row.epsilon);
    text += ',';
    text += std::to_string(row.window);
    text += ',';
    text += csv::format_double(row.ratio);
    text += ',';
    text += std::to_string(row.repetition);
    text += ',';
    text += std::to_string(row.seed);
    text += ',';
    text += csv::format_double(row.amre);
    text += ',';
    text += csv::format_double(row.ajsd);
    text += ',';
    text += csv::format_double(row.runtime_ms);
    text += ',';
    text += row.audit_ok ? "true" : "false";
    out.line(text);
  }
  out.close();
}

void write_summary_csv(std::span<const SummaryRow> rows,
                       const std::string& path) {
  csv::FileWriter out(path);
  out.line("mechanism,epsilon,window,ratio,median_amre,mean_amre,"
           "ln_mean_amre,median_ajsd,mean_ajsd,ln_mean_ajsd");
  for (const SummaryRow& row : rows) {
    std::string text;
    text += mechanism_name(row.mechanism);
    text += ',';
    text += csv::format_double(row.epsilon);
    text += ',';
    text += std::to_string(row.window);
    text += ',';
    text += csv::format_double(row.ratio);
    text += ',';
    text += csv::format_double(row.median_amre);
    text += ',';
    text += csv::format_double(row.mean_amre);
    text += ',';
    text += csv::format_double(row.ln_mean_amre);
    text += ',';
    text += csv::format_double(row.median_ajsd);
    text += ',';
    text += csv::format_double(row.mean_ajsd);
    text += ',';
    text += csv::format_double(row.ln_mean_ajsd);
    out.line(text);
  }
  out.close();
}

namespace {

struct Cell {
  Mechanism mechanism;
  double epsilon;
  std::int32_t window;
  std::int32_t repetition;  // 1-based
};

std::unique_ptr<Publisher> make_publisher(const ExperimentConfig& config,
                                          const Cell& cell,
                                          std::uint32_t n_users,
                                          const CellSeeds& seeds,
                                          NoiseMode noise) {
  PublisherOptions options;
  options.sensitivity = 1.0;
  options.seed = seeds.publisher;
  options.noise = noise;
  if (cell.mechanism == Mechanism::kBd || cell.mechanism == Mechanism::kBa) {
    const BaselineRequirement base =
        baseline_requirement(config.model, cell.epsilon, cell.window);
    const BaselineKind kind = cell.mechanism == Mechanism::kBd
                                  ? BaselineKind::kBd
                                  : BaselineKind::kBa;
    return make_baseline(kind, base.window, base.epsilon, n_users, options);
  }
  RandomSource assignment_rng(seeds.assignment, noise);
  std::vector<PrivacyRequirement> requirements = assign_requirements(
      config.model, cell.epsilon, cell.window, n_users, assignment_rng);
  switch (cell.mechanism) {
    case Mechanism::kPbd:
      return std::make_unique<PbdPublisher>(std::move(requirements), options);
    case Mechanism::kPba:
      return std::make_unique<PbaPublisher>(std::move(requirements), options);
    case Mechanism::kUniform:
      return std::make_unique<UniformPublisher>(std::move(requirements),
                                                options);
    case Mechanism::kPlbu:
      return std::make_unique<PlbuPublisher>(std::move(requirements), options);
    case Mechanism::kBd:
    case Mechanism::kBa:
      break;
  }
  throw std::invalid_argument("unknown mechanism");
}

ResultRow run_cell(const ExperimentConfig& config, const Cell& cell,
                   const std::vector<SlotDatabase>* shared_slots,
                   std::uint32_t n_users, NoiseMode noise) {
  const CellSeeds seeds = derive_cell_seeds(
      config.master_seed, cell.mechanism, cell.epsilon, cell.window,
      cell.repetition);
  const auto start = std::chrono::steady_clock::now();

  std::vector<SlotDatabase> generated;
  const std::vector<SlotDatabase>* slots = shared_slots;
  if (slots == nullptr) {
    generated = build_stream(config.dataset, seeds.stream, noise);
    slots = &generated;
  }

  std::unique_ptr<Publisher> publisher =
      make_publisher(config, cell, n_users, seeds, noise);

  std::vector<Histogram> released;
  std::vector<Histogram> truth;
  released.reserve(slots->size());
  truth.reserve(slots->size());
  for (const SlotDatabase& db : *slots) {
    released.push_back(publisher->step(db).histogram());
    truth.push_back(count_query(db));
  }
  const bool audit_ok = publisher->ledger().audit().empty();

  ResultRow row;
  row.mechanism = cell.mechanism;
  row.epsilon = cell.epsilon;
  row.window = cell.window;
  row.ratio = config.model.kind == RequirementModel::Kind::kTwoPoint
                  ? config.model.two_point.ratio
                  : 1.0;
  row.repetition = cell.repetition;
  row.seed = seeds.publisher;
  row.amre = amre(released, truth);
  row.ajsd = ajsd(released, truth);
  row.audit_ok = audit_ok;
  const auto end = std::chrono::steady_clock::now();
  row.runtime_ms =
      std::chrono::duration<double, std::milli>(end - start).count();
  return row;
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config, int jobs) {
  validate_config(config);
  const NoiseMode noise =
      config.zero_noise ? NoiseMode::kZeroNoise : NoiseMode::kStochastic;

  std::optional<IngestedStream> ingested;
  const std::vector<SlotDatabase>* shared_slots = nullptr;
  std::uint32_t n_users = config.dataset.n_users;
  if (config.dataset.kind == StreamKind::kCsv) {
    ingested = ingest_csv(config.dataset.path, config.dataset.domain);
    if (ingested->slots.empty()) {
      throw std::runtime_error("empty stream: " + config.dataset.path);
    }
    shared_slots = &ingested->slots;
    n_users = static_cast<std::uint32_t>(ingested->user_names.size());
  }

  std::vector<Cell> cells;
  cells.reserve(config.mechanisms.size() * config.epsilon_grid.size() *
                config.window_grid.size() *
                static_cast<std::size_t>(config.repetitions));
  for (const Mechanism mechanism : config.mechanisms) {
    for (const double epsilon : config.epsilon_grid) {
      for (const std::int32_t window : config.window_grid) {
        for (std::int32_t rep = 1; rep <= config.repetitions; ++rep) {
          cells.push_back(Cell{mechanism, epsilon, window, rep});
        }
      }
    }
  }

  std::vector<ResultRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  const auto worker = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= cells.size()) return;
      try {
        rows[i] = run_cell(config, cells[i], shared_slots, n_users, noise);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  const int worker_count = std::max(
      1, std::min<int>(jobs, static_cast<int>(cells.size())));
  if (worker_count == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(worker_count));
    for (int i = 0; i < worker_count; ++i) threads.emplace_back(worker);
    for (std::thread& thread : threads) thread.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  RunOutcome outcome;
  outcome.rows = std::move(rows);
  outcome.summary = summarize(outcome.rows);
  outcome.all_audits_ok = std::all_of(
      outcome.rows.begin(), outcome.rows.end(),
      [](const ResultRow& row) { return row.audit_ok; });

  std::filesystem::create_directories(config.output_dir);
  const std::filesystem::path dir(config.output_dir);
  outcome.results_path = (dir / "results.csv").string();
  outcome.summary_path = (dir / "summary.csv").string();
  write_results_csv(outcome.rows, outcome.results_path);
  write_summary_csv(outcome.summary, outcome.summary_path);
  return outcome;
}

}  // namespace pwsm
