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

#ifndef PWSM_RANDOM_HPP_
#define PWSM_RANDOM_HPP_

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace pwsm {

// Noise regime of a RandomSource. kZeroNoise turns additive noise off so a
// mechanism pipeline can be traced deterministically: Laplace and Gaussian
// return 0 and Bernoulli(p) degenerates to p >= 1. Uniform draws are
// unaffected.
enum class NoiseMode { kStochastic, kZeroNoise };

// Deterministic random source behind all mechanism noise.
//
// The core generator is xoshiro256++ with its state expanded from the seed
// by splitmix64. Both algorithms are fixed here, in-repo, so a given seed
// yields bit-identical draw sequences on every platform and toolchain (the
// standard library's distributions make no such guarantee). Distributions
// are derived from the raw 64-bit stream with explicit arithmetic:
//   uniform double  (x >> 11) * 2^-53
//   Laplace         inverse CDF  -scale * sgn(u) * ln(1 - 2|u|)
//   Gaussian        Box-Muller, two uniforms per draw
// Two sources with the same seed and the same call sequence produce
// bit-identical outputs.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed,
                        NoiseMode mode = NoiseMode::kStochastic);

  NoiseMode mode() const { return mode_; }

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53-bit resolution.
  double next_double();
  // Bernoulli(p), p in [0, 1]. In zero-noise mode returns p >= 1 and
  // consumes no randomness.
  bool bernoulli(double p);
  // Laplace(0, scale), scale > 0. Returns 0 in zero-noise mode.
  double laplace(double scale);
  // Gaussian(0, stddev), stddev >= 0. Returns 0 in zero-noise mode.
  double gaussian(double stddev);
  // Uniform integer on [0, bound), bound >= 1.
  std::uint32_t uniform_int(std::uint32_t bound);

  // Fisher-Yates shuffle driven by uniform_int.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = uniform_int(static_cast<std::uint32_t>(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  // Uniform on (0, 1), both endpoints excluded; safe as a log argument.
  double next_double_open();

  std::array<std::uint64_t, 4> state_;
  NoiseMode mode_;
};

// Stateless 64-bit scrambler (the splitmix64 output function). Fixed
// forever; used for seed derivation.
std::uint64_t scramble_u64(std::uint64_t x);

// FNV-1a hash of a string, for folding names into seed derivations.
std::uint64_t hash_string(std::string_view text);

// Derives a child seed from a base seed and a list of context words
// (hashed names, parameter bit patterns, indices). Stable across platforms
// and releases; distinct word sequences give independent-looking seeds.
std::uint64_t mix_seed(std::uint64_t base, std::span<const std::uint64_t> words);
std::uint64_t mix_seed(std::uint64_t base,
                       std::initializer_list<std::uint64_t> words);

// Bit pattern of a double, for use as a mix_seed context word.
std::uint64_t double_bits(double value);

}  // namespace pwsm

#endif  // PWSM_RANDOM_HPP_
