// Copyright 2026 The dcfcalc Authors
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

// Counter-based 64-bit generator. A stream is a (key, counter) pair and each
// draw is a stateless mix of key and counter, so substreams for any
// (seed, replication, station, purpose) tuple are independent and cheap to
// derive without sequential state.

#pragma once

#include <cmath>
#include <cstdint>

namespace dcf {

inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  // SplitMix64 finalizer.
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum class StreamPurpose : std::uint64_t { backoff = 1, arrivals = 2 };

class CounterRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  constexpr explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  // Seeding topology: replication seeds are seed + index; station and purpose
  // are folded in through successive mixing.
  static constexpr CounterRng for_station(std::uint64_t seed, std::uint64_t station,
                                          StreamPurpose purpose) noexcept {
    std::uint64_t k = mix64(seed + kGamma);
    k = mix64(k ^ (station * 0xd1b54a32d192ed03ULL + 1));
    k = mix64(k ^ (static_cast<std::uint64_t>(purpose) * 0xabc98388fb8fac03ULL));
    return CounterRng(k);
  }

  constexpr std::uint64_t next() noexcept { return mix64(key_ + kGamma * ++counter_); }

  // Uniform on [0, bound) by Lemire's multiply-and-reject.
  std::uint64_t uniform_below(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double exponential(double rate) noexcept { return -std::log1p(-uniform01()) / rate; }

  constexpr std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace dcf
