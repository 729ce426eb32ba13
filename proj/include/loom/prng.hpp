// Copyright 2026 The Loom Authors
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

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace loom {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t hash_label(std::string_view label) {
  // FNV-1a, stable across platforms.
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Deterministic, fork-able random stream. All sampler output in the library
// flows through this class so a run is reproducible from its seed set.
class Prng {
 public:
  explicit Prng(uint64_t seed)
      : gen_(splitmix64(seed)), seed_base_(splitmix64(seed)) {}

  // Independent child stream identified by a label and an index.
  Prng fork(std::string_view label, uint64_t index = 0) const {
    return Prng(seed_base_ ^ hash_label(label) ^ splitmix64(index + 0x51ed2701));
  }

  uint64_t next_u64() { return gen_(); }

  // Uniform in [0, bound) without modulo bias worth caring about
  // (128-bit multiply-shift reduction).
  uint64_t uniform_below(uint64_t bound) {
    const unsigned __int128 wide =
        static_cast<unsigned __int128>(next_u64()) * bound;
    return static_cast<uint64_t>(wide >> 64);
  }

  // Uniform double in [0, 1).
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller, with the spare cached. Avoids std::normal_distribution so
  // streams are bit-stable across standard libraries.
  double normal(double stddev) {
    if (has_spare_) {
      has_spare_ = false;
      return spare_ * stddev;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double two_pi = 6.283185307179586476925286766559;
    spare_ = mag * std::sin(two_pi * u2);
    has_spare_ = true;
    return mag * std::cos(two_pi * u2) * stddev;
  }

  uint64_t seed_base() const { return seed_base_; }

 private:
  std::mt19937_64 gen_;
  uint64_t seed_base_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace loom
