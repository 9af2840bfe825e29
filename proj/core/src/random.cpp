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

#include "pwsm/random.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>

namespace pwsm {
namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

constexpr std::uint64_t kSplitmixIncrement = 0x9E3779B97F4A7C15ULL;

}  // namespace

std::uint64_t scramble_u64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RandomSource::RandomSource(std::uint64_t seed, NoiseMode mode) : mode_(mode) {
  // splitmix64 stream expands the seed into the xoshiro256++ state.
  std::uint64_t s = seed;
  for (auto& word : state_) {
    s += kSplitmixIncrement;
    word = scramble_u64(s);
  }
}

std::uint64_t RandomSource::next_u64() {
  // xoshiro256++ step.
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RandomSource::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomSource::next_double_open() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

bool RandomSource::bernoulli(double p) {
  if (!(p >= 0.0) || !(p <= 1.0)) {
    throw std::invalid_argument("invalid probability: must be in [0, 1]");
  }
  if (mode_ == NoiseMode::kZeroNoise) {
    return p >= 1.0;
  }
  return next_double() < p;
}

double RandomSource::laplace(double scale) {
  if (!std::isfinite(scale) || scale <= 0.0) {
    throw std::invalid_argument("invalid scale: must be positive and finite");
  }
  if (mode_ == NoiseMode::kZeroNoise) {
    return 0.0;
  }
  const double u = next_double_open() - 0.5;  // (-0.5, 0.5)
  const double sign = u < 0.0 ? -1.0 : 1.0;
  return -scale * sign * std::log(1.0 - 2.0 * std::abs(u));
}

double RandomSource::gaussian(double stddev) {
  if (!std::isfinite(stddev) || stddev < 0.0) {
    throw std::invalid_argument(
        "invalid stddev: must be non-negative and finite");
  }
  if (mode_ == NoiseMode::kZeroNoise || stddev == 0.0) {
    return 0.0;
  }
  const double u1 = next_double_open();
  const double u2 = next_double_open();
  return stddev * std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::uint32_t RandomSource::uniform_int(std::uint32_t bound) {
  if (bound == 0) {
    throw std::invalid_argument("invalid bound: must be >= 1");
  }
  // Multiply-shift map of the full 64-bit draw onto [0, bound); the bias is
  // below 2^-32 per value and the mapping is platform-stable.
  const unsigned __int128 product =
      static_cast<unsigned __int128>(next_u64()) *
      static_cast<unsigned __int128>(bound);
  return static_cast<std::uint32_t>(product >> 64);
}

std::uint64_t hash_string(std::string_view text) {
  // FNV-1a, 64-bit.
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t mix_seed(std::uint64_t base,
                       std::span<const std::uint64_t> words) {
  std::uint64_t h = scramble_u64(base + kSplitmixIncrement);
  for (std::uint64_t w : words) {
    h = scramble_u64((h ^ w) + kSplitmixIncrement);
  }
  return h;
}

std::uint64_t mix_seed(std::uint64_t base,
                       std::initializer_list<std::uint64_t> words) {
  return mix_seed(base, std::span<const std::uint64_t>(words.begin(),
                                                       words.size()));
}

std::uint64_t double_bits(double value) {
  return std::bit_cast<std::uint64_t>(value);
}

}  // namespace pwsm
