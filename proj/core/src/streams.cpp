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

#include "pwsm/streams.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "csv_util.hpp"

namespace pwsm {
namespace {

void check_probability(double p, const char* what) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    throw std::invalid_argument(std::string("invalid ") + what +
                                ": must be a probability in [0, 1]");
  }
}

void check_counts(std::uint32_t n_users, std::int64_t t_slots) {
  if (n_users < 1) {
    throw std::invalid_argument("invalid user count: must be >= 1");
  }
  if (t_slots < 0) {
    throw std::invalid_argument("invalid slot count: must be >= 0");
  }
}

// Binary slots from a per-slot event probability path.
std::vector<SlotDatabase> bits_from_path(std::uint32_t n_users,
                                         std::span<const double> path,
                                         RandomSource& rng) {
  std::vector<SlotDatabase> slots;
  slots.reserve(path.size());
  for (std::size_t k = 0; k < path.size(); ++k) {
    std::vector<std::int32_t> values(n_users);
    for (auto& v : values) {
      v = rng.bernoulli(path[k]) ? 1 : 0;
    }
    slots.emplace_back(static_cast<std::int64_t>(k) + 1, 2,
                       std::move(values));
  }
  return slots;
}

}  // namespace

std::vector<double> tlns_probability_path(std::int64_t t_slots,
                                          const TlnsParams& params,
                                          RandomSource& rng) {
  check_probability(params.start, "start probability");
  if (!std::isfinite(params.stddev) || params.stddev < 0.0) {
    throw std::invalid_argument(
        "invalid stddev: must be non-negative and finite");
  }
  if (t_slots < 0) {
    throw std::invalid_argument("invalid slot count: must be >= 0");
  }
  std::vector<double> path;
  path.reserve(static_cast<std::size_t>(t_slots));
  double p = params.start;
  for (std::int64_t k = 0; k < t_slots; ++k) {
    if (k > 0) {
      p = std::clamp(p + rng.gaussian(params.stddev), 0.0, 1.0);
    }
    path.push_back(p);
  }
  return path;
}

double sin_probability(const SinParams& params, double t) {
  return params.amplitude * std::sin(params.omega * t) + params.offset;
}

double log_probability(const LogParams& params, double t) {
  return params.amplitude / (1.0 + std::exp(-params.rate * t));
}

std::vector<SlotDatabase> gen_tlns(std::uint32_t n_users, std::int64_t t_slots,
                                   const TlnsParams& params,
                                   RandomSource& rng) {
  check_counts(n_users, t_slots);
  const std::vector<double> path =
      tlns_probability_path(t_slots, params, rng);
  return bits_from_path(n_users, path, rng);
}

std::vector<SlotDatabase> gen_sin(std::uint32_t n_users, std::int64_t t_slots,
                                  const SinParams& params, RandomSource& rng) {
  check_counts(n_users, t_slots);
  // The whole range of the sinusoid must stay a probability.
  check_probability(params.offset - std::abs(params.amplitude),
                    "probability range");
  check_probability(params.offset + std::abs(params.amplitude),
                    "probability range");
  std::vector<double> path;
  path.reserve(static_cast<std::size_t>(t_slots));
  for (std::int64_t s = 1; s <= t_slots; ++s) {
    path.push_back(sin_probability(params, static_cast<double>(s - 1)));
  }
  return bits_from_path(n_users, path, rng);
}

std::vector<SlotDatabase> gen_log(std::uint32_t n_users, std::int64_t t_slots,
                                  const LogParams& params, RandomSource& rng) {
  check_counts(n_users, t_slots);
  check_probability(params.amplitude, "amplitude");
  if (!std::isfinite(params.rate)) {
    throw std::invalid_argument("invalid rate: must be finite");
  }
  std::vector<double> path;
  path.reserve(static_cast<std::size_t>(t_slots));
  for (std::int64_t s = 1; s <= t_slots; ++s) {
    path.push_back(log_probability(params, static_cast<double>(s - 1)));
  }
  return bits_from_path(n_users, path, rng);
}

std::uint32_t grid_bucket(double lon, double lat, const GridSpec& grid) {
  if (grid.cells_x < 1 || grid.cells_y < 1) {
    throw std::invalid_argument("invalid grid: needs at least one cell");
  }
  if (!(grid.lon_min < grid.lon_max) || !(grid.lat_min < grid.lat_max)) {
    throw std::invalid_argument("invalid grid: empty coordinate box");
  }
  if (!std::isfinite(lon) || lon < grid.lon_min || lon > grid.lon_max) {
    throw std::invalid_argument("coordinate outside A_E grid bounds: longitude " +
                                csv::format_double(lon));
  }
  if (!std::isfinite(lat) || lat < grid.lat_min || lat > grid.lat_max) {
    throw std::invalid_argument("coordinate outside A_E grid bounds: latitude " +
                                csv::format_double(lat));
  }
  const double col_width = (grid.lon_max - grid.lon_min) / grid.cells_x;
  const double row_height = (grid.lat_max - grid.lat_min) / grid.cells_y;
  auto cell = [](double value, double low, double width,
                 std::uint32_t cells) {
    const auto index =
        static_cast<std::int64_t>(std::floor((value - low) / width));
    // The closed upper edge belongs to the last cell.
    return static_cast<std::uint32_t>(std::clamp<std::int64_t>(
        index, 0, static_cast<std::int64_t>(cells) - 1));
  };
  const std::uint32_t col = cell(lon, grid.lon_min, col_width, grid.cells_x);
  const std::uint32_t row = cell(lat, grid.lat_min, row_height, grid.cells_y);
  return col + grid.cells_x * row;
}

IngestedStream ingest_csv(const std::string& path, const DomainSpec& domain) {
  const bool with_grid = std::holds_alternative<GridSpec>(domain);
  const std::uint32_t domain_size =
      with_grid ? std::get<GridSpec>(domain).domain_size()
                : std::get<CategoricalDomain>(domain).domain_size;
  if (domain_size < 1) {
    throw std::invalid_argument("invalid domain size: must be >= 1");
  }
  const std::size_t expected_fields = with_grid ? 4 : 3;

  csv::LineReader reader(path);
  IngestedStream stream;
  std::unordered_map<std::string, std::uint32_t> ids;
  // (user, slot) -> category; materialized into slots afterwards.
  std::vector<std::vector<std::pair<std::int64_t, std::int32_t>>> events;
  std::int64_t max_slot = 0;
  std::string line;
  while (reader.next(line)) {
    if (csv::trim(line).empty()) {
      continue;
    }
    const auto fields = csv::split(line);
    if (reader.line_number() == 1 && !fields.empty() &&
        fields[0] == "user_id") {
      continue;
    }
    if (fields.size() != expected_fields) {
      csv::fail_line(path, reader.line_number(),
                     with_grid ? "expected user_id,slot,lon,lat"
                               : "expected user_id,slot,category");
    }
    std::string id(fields[0]);
    if (id.empty()) {
      csv::fail_line(path, reader.line_number(), "empty user id");
    }
    const auto [it, inserted] =
        ids.emplace(std::move(id), static_cast<std::uint32_t>(ids.size()));
    if (inserted) {
      stream.user_names.push_back(it->first);
      events.emplace_back();
    }
    const std::uint32_t user = it->second;
    const std::int64_t slot =
        csv::parse_int(fields[1], path, reader.line_number());
    if (slot < 1) {
      csv::fail_line(path, reader.line_number(), "slot must be >= 1");
    }
    std::int64_t category;
    if (with_grid) {
      const double lon =
          csv::parse_double(fields[2], path, reader.line_number());
      const double lat =
          csv::parse_double(fields[3], path, reader.line_number());
      try {
        category = grid_bucket(lon, lat, std::get<GridSpec>(domain));
      } catch (const std::invalid_argument& e) {
        csv::fail_line(path, reader.line_number(), e.what());
      }
    } else {
      category = csv::parse_int(fields[2], path, reader.line_number());
      if (category < 0 || category >= static_cast<std::int64_t>(domain_size)) {
        csv::fail_line(path, reader.line_number(),
                       "category out of range for domain size " +
                           std::to_string(domain_size));
      }
    }
    events[user].emplace_back(slot, static_cast<std::int32_t>(category));
    max_slot = std::max(max_slot, slot);
  }

  const std::uint32_t n_users = static_cast<std::uint32_t>(ids.size());
  std::vector<std::vector<std::int32_t>> values(
      static_cast<std::size_t>(max_slot),
      std::vector<std::int32_t>(n_users, SlotDatabase::kAbsent));
  for (std::uint32_t user = 0; user < n_users; ++user) {
    // File order: later duplicates of a (user, slot) overwrite earlier ones.
    for (const auto& [slot, category] : events[user]) {
      values[static_cast<std::size_t>(slot - 1)][user] = category;
    }
  }
  stream.slots.reserve(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    stream.slots.emplace_back(static_cast<std::int64_t>(k) + 1, domain_size,
                              std::move(values[k]));
  }
  return stream;
}

void write_stream_csv(std::span<const SlotDatabase> slots,
                      const std::string& path) {
  csv::FileWriter out(path);
  out.line("user_id,slot,category");
  for (const auto& db : slots) {
    for (std::uint32_t user = 0; user < db.user_count(); ++user) {
      const std::int32_t v = db.values()[user];
      if (v != SlotDatabase::kAbsent) {
        out.line(std::to_string(user) + "," + std::to_string(db.slot()) +
                 "," + std::to_string(v));
      }
    }
  }
  out.close();
}

}  // namespace pwsm
