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
// Event stream sources: synthetic binary streams driven by a per-slot event
// probability (a truncated Gaussian random walk, a sinusoid, or a
// logistic ramp), and CSV ingestion for recorded streams, either with
// explicit categories or with coordinates bucketed onto a rectangular grid.

#ifndef PWSM_STREAMS_HPP_
#define PWSM_STREAMS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pwsm/model.hpp"
#include "pwsm/random.hpp"

namespace pwsm {

// Synthetic streams are binary (domain {0, 1}); every user is present every
// slot and reports 1 with the slot's event probability. Slot s (1-based)
// uses the probability value at continuous time s - 1, so the anchor value
// holds exactly at the first slot.

struct TlnsParams {
  double start = 0.05;    // probability at the first slot
  double stddev = 0.0025; // per-step Gaussian increment
};

struct SinParams {
  double amplitude = 0.05;
  double omega = 0.01;  // angular frequency per slot
  double offset = 0.075;
};

struct LogParams {
  double amplitude = 0.25;  // supremum of the ramp
  double rate = 0.01;
};

// Random-walk probability path: p[0] = start, p[k] = clamp(p[k-1] + N(0,
// stddev^2)) into [0, 1]. One Gaussian draw per step after the first.
std::vector<double> tlns_probability_path(std::int64_t t_slots,
                                          const TlnsParams& params,
                                          RandomSource& rng);
// amplitude * sin(omega * t) + offset, at continuous time t.
double sin_probability(const SinParams& params, double t);
// amplitude / (1 + e^(-rate * t)), at continuous time t.
double log_probability(const LogParams& params, double t);

std::vector<SlotDatabase> gen_tlns(std::uint32_t n_users, std::int64_t t_slots,
                                   const TlnsParams& params,
                                   RandomSource& rng);
std::vector<SlotDatabase> gen_sin(std::uint32_t n_users, std::int64_t t_slots,
                                  const SinParams& params, RandomSource& rng);
std::vector<SlotDatabase> gen_log(std::uint32_t n_users, std::int64_t t_slots,
                                  const LogParams& params, RandomSource& rng);

// Rectangular bucketing grid over a coordinate box. Cells are row-major:
// index = col + cells_x * row, where col counts longitude steps and row
// counts latitude steps. Points on the closed upper edges fall into the
// last cell; points outside the box are an error.
struct GridSpec {
  double lon_min = 116.0;
  double lon_max = 116.8;
  double lat_min = 39.5;
  double lat_max = 40.3;
  std::uint32_t cells_x = 10;
  std::uint32_t cells_y = 10;

  std::uint32_t domain_size() const { return cells_x * cells_y; }
};

std::uint32_t grid_bucket(double lon, double lat, const GridSpec& grid);

struct CategoricalDomain {
  std::uint32_t domain_size;
};

using DomainSpec = std::variant<CategoricalDomain, GridSpec>;

struct IngestedStream {
  std::vector<SlotDatabase> slots;
  std::vector<std::string> user_names;  // by dense user index
};

// Reads a recorded stream. With a CategoricalDomain the rows are
// `user_id,slot,category`; with a GridSpec they are `user_id,slot,lon,lat`.
// A first line equal to the column names is skipped. User ids are arbitrary
// comma-free strings, mapped to dense indices by first appearance; slots
// run 1..max(slot); for duplicate (user, slot) rows the last one wins.
IngestedStream ingest_csv(const std::string& path, const DomainSpec& domain);

// Writes `user_id,slot,category` rows (users named by their dense index)
// for every present user, ordered by slot then user.
void write_stream_csv(std::span<const SlotDatabase> slots,
                      const std::string& path);

}  // namespace pwsm

#endif  // PWSM_STREAMS_HPP_
