// Copyright 2026 The corp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <limits>

namespace corp {

namespace detail {
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Counter-based random stream keyed by (seed, stream, substream).
///
/// Every (seed, replicate, observation) triple addresses its own sequence,
/// so results do not depend on the order in which work units run.
/// Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0)
      : key_(detail::splitmix64(detail::splitmix64(detail::splitmix64(seed) ^ stream) ^
                                (substream * 0xD1B54A32D192ED03ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return detail::splitmix64(key_ + 0x9E3779B97F4A7C15ULL * counter_++); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Uniform variate on the open interval (0, 1) with 53 random bits.
template <class URBG>
double uniform_open(URBG& rng) {
  static_assert(URBG::min() == 0 && URBG::max() == std::numeric_limits<std::uint64_t>::max(),
                "uniform_open expects a 64-bit generator");
  const std::uint64_t bits = rng() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

/// Uniform index in [0, n) by multiply-shift on 64 random bits.
template <class URBG>
std::uint64_t uniform_index(URBG& rng, std::uint64_t n) {
  const unsigned __int128 prod = static_cast<unsigned __int128>(rng()) * n;
  return static_cast<std::uint64_t>(prod >> 64);
}

}  // namespace corp
