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

#include <cstdint>
#include <vector>

#include "loom/errors.hpp"

namespace loom {

using u64 = uint64_t;
using u128 = unsigned __int128;
using i64 = int64_t;
using i128 = __int128;

inline u64 addmod(u64 a, u64 b, u64 q) {
  u64 r = a + b;
  return r >= q ? r - q : r;
}

inline u64 submod(u64 a, u64 b, u64 q) { return a >= b ? a - b : a + q - b; }

inline u64 mulmod(u64 a, u64 b, u64 q) {
  return static_cast<u64>(static_cast<u128>(a) * b % q);
}

inline u64 powmod(u64 base, u64 exp, u64 q) {
  u64 r = 1;
  base %= q;
  while (exp) {
    if (exp & 1) r = mulmod(r, base, q);
    base = mulmod(base, base, q);
    exp >>= 1;
  }
  return r;
}

// Fermat inverse; q must be prime.
inline u64 invmod(u64 a, u64 q) { return powmod(a, q - 2, q); }

// Shoup precomputation: floor(w * 2^64 / q). Lets the NTT hot loop multiply
// by a constant with two 64x64 products and no division.
inline u64 shoup_of(u64 w, u64 q) {
  return static_cast<u64>((static_cast<u128>(w) << 64) / q);
}

inline u64 mulmod_shoup(u64 a, u64 w, u64 w_shoup, u64 q) {
  const u64 hi = static_cast<u64>((static_cast<u128>(a) * w_shoup) >> 64);
  const u64 r = a * w - hi * q;
  return r >= q ? r - q : r;
}

inline bool miller_rabin(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL,
                29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // Deterministic witness set for all 64-bit integers.
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL,
                29ULL, 31ULL, 37ULL}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

// Finds `count` distinct primes of roughly `bits` bits with p = 1 (mod 2n),
// scanning upward from 2^bits (so a scale of exactly 2^bits stays below
// every prime). Such primes admit a primitive 2n-th root of unity, which
// the negacyclic NTT requires.
inline std::vector<u64> find_ntt_primes(size_t n, int bits, size_t count,
                                        const std::vector<u64>& avoid = {}) {
  if (bits < 20 || bits > 58) throw ParameterError("prime size out of range");
  const u64 step = 2 * static_cast<u64>(n);
  u64 candidate = (u64(1) << bits) + 1;
  candidate += (step - (candidate - 1) % step) % step;  // = 1 (mod 2n)
  std::vector<u64> out;
  while (out.size() < count) {
    if (candidate >= (u64(1) << (bits + 1)))
      throw ParameterError("prime search exhausted range");
    if (miller_rabin(candidate)) {
      bool used = false;
      for (u64 p : avoid) used |= (p == candidate);
      for (u64 p : out) used |= (p == candidate);
      if (!used) out.push_back(candidate);
    }
    candidate += step;
  }
  return out;
}

// Primitive 2n-th root of unity mod prime q (q = 1 mod 2n).
inline u64 find_primitive_root(u64 q, size_t n, u64 tries_seed = 1) {
  const u64 order = 2 * static_cast<u64>(n);
  if ((q - 1) % order != 0)
    throw ParameterError("modulus lacks required root of unity");
  const u64 cofactor = (q - 1) / order;
  for (u64 x = 2 + tries_seed; x < q; ++x) {
    const u64 g = powmod(x, cofactor, q);
    // g has order dividing 2n; g^n == -1 certifies order exactly 2n.
    if (powmod(g, n, q) == q - 1) return g;
  }
  throw ParameterError("no primitive root found");
}

inline int ceil_log2(u64 x) {
  int b = 0;
  while ((u64(1) << b) < x) ++b;
  return b;
}

inline bool is_power_of_two(u64 x) { return x != 0 && (x & (x - 1)) == 0; }

// Smallest power of two >= x.
inline u64 next_pow2(u64 x) {
  u64 p = 1;
  while (p < x) p <<= 1;
  return p;
}

inline u64 bit_reverse(u64 x, int bits) {
  u64 r = 0;
  for (int i = 0; i < bits; ++i) {
    r = (r << 1) | (x & 1);
    x >>= 1;
  }
  return r;
}

}  // namespace loom
