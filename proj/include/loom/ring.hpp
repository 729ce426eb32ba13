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
#include <vector>

#include "loom/errors.hpp"
#include "loom/numth.hpp"
#include "loom/prng.hpp"

namespace loom {

// Parameters of the negacyclic ring Z_Q[X]/(X^N + 1) with a residue-form
// moduli chain. `moduli` is the main chain {q_0, ..., q_L}; `special` holds
// the key-switching auxiliary primes (never part of a ciphertext level).
struct RingParams {
  size_t n = 0;
  std::vector<u64> moduli;
  std::vector<u64> special;
  double eta = 3.2;
};

// Convenience chain builder: one q_0 of `q0_bits`, `levels` primes of
// `q_bits`, and `n_special` auxiliaries of `sp_bits`.
inline RingParams make_ring_params(size_t n, int levels, int q0_bits,
                                   int q_bits, int n_special, int sp_bits,
                                   double eta = 3.2) {
  RingParams rp;
  rp.n = n;
  rp.eta = eta;
  rp.moduli = find_ntt_primes(n, q0_bits, 1);
  if (levels > 0) {
    auto mids = find_ntt_primes(n, q_bits, levels, rp.moduli);
    rp.moduli.insert(rp.moduli.end(), mids.begin(), mids.end());
  }
  std::vector<u64> avoid = rp.moduli;
  rp.special = find_ntt_primes(n, sp_bits, n_special, avoid);
  return rp;
}

// Per-prime negacyclic NTT (Cooley-Tukey forward, Gentleman-Sande inverse)
// with Shoup-precomputed twiddles.
class NttTables {
 public:
  NttTables() = default;

  NttTables(u64 q, size_t n) : q_(q), n_(n) {
    if (!is_power_of_two(n)) throw ParameterError("ring dimension not 2^k");
    if ((q - 1) % (2 * n) != 0)
      throw ParameterError("modulus lacks required root of unity");
    const int logn = ceil_log2(n);
    const u64 psi = find_primitive_root(q, n);
    const u64 ipsi = invmod(psi, q);
    fwd_.resize(n);
    fwd_shoup_.resize(n);
    inv_.resize(n);
    inv_shoup_.resize(n);
    for (size_t k = 0; k < n; ++k) {
      const u64 e = bit_reverse(k, logn);
      fwd_[k] = powmod(psi, e, q);
      fwd_shoup_[k] = shoup_of(fwd_[k], q);
      inv_[k] = powmod(ipsi, e, q);
      inv_shoup_[k] = shoup_of(inv_[k], q);
    }
    ninv_ = invmod(static_cast<u64>(n % q), q);
    ninv_shoup_ = shoup_of(ninv_, q);
  }

  u64 modulus() const { return q_; }

  void forward(u64* a) const {
    size_t t = n_ >> 1;
    for (size_t m = 1; m < n_; m <<= 1) {
      for (size_t i = 0; i < m; ++i) {
        const size_t j1 = 2 * i * t;
        const u64 w = fwd_[m + i];
        const u64 ws = fwd_shoup_[m + i];
        for (size_t j = j1; j < j1 + t; ++j) {
          const u64 u = a[j];
          const u64 v = mulmod_shoup(a[j + t], w, ws, q_);
          a[j] = addmod(u, v, q_);
          a[j + t] = submod(u, v, q_);
        }
      }
      t >>= 1;
    }
  }

  void inverse(u64* a) const {
    size_t t = 1;
    for (size_t m = n_; m > 1; m >>= 1) {
      const size_t h = m >> 1;
      size_t j1 = 0;
      for (size_t i = 0; i < h; ++i) {
        const u64 w = inv_[h + i];
        const u64 ws = inv_shoup_[h + i];
        for (size_t j = j1; j < j1 + t; ++j) {
          const u64 u = a[j];
          const u64 v = a[j + t];
          a[j] = addmod(u, v, q_);
          a[j + t] = mulmod_shoup(submod(u, v, q_), w, ws, q_);
        }
        j1 += 2 * t;
      }
      t <<= 1;
    }
    for (size_t j = 0; j < n_; ++j)
      a[j] = mulmod_shoup(a[j], ninv_, ninv_shoup_, q_);
  }

 private:
  u64 q_ = 0;
  size_t n_ = 0;
  std::vector<u64> fwd_, fwd_shoup_, inv_, inv_shoup_;
  u64 ninv_ = 0, ninv_shoup_ = 0;
};

// One ring element. `residues[r]` holds the length-n vector mod base r:
// bases 0..level are the main chain; when `extended`, the special primes
// follow. `ntt` flags evaluation (NTT) form.
struct RingPoly {
  std::vector<std::vector<u64>> residues;
  int level = 0;
  bool ntt = false;
  bool extended = false;

  size_t nmain() const { return static_cast<size_t>(level) + 1; }
  size_t nres() const { return residues.size(); }
};

class RingContext {
 public:
  explicit RingContext(RingParams params) : params_(std::move(params)) {
    const size_t n = params_.n;
    if (!is_power_of_two(n) || n < 8)
      throw ParameterError("ring dimension must be a power of two >= 8");
    if (params_.moduli.empty()) throw ParameterError("empty moduli chain");
    all_moduli_ = params_.moduli;
    all_moduli_.insert(all_moduli_.end(), params_.special.begin(),
                       params_.special.end());
    for (size_t i = 0; i < all_moduli_.size(); ++i) {
      for (size_t j = i + 1; j < all_moduli_.size(); ++j)
        if (all_moduli_[i] == all_moduli_[j])
          throw ParameterError("moduli must be pairwise distinct");
    }
    for (u64 q : all_moduli_) {
      if (!miller_rabin(q)) throw ParameterError("modulus is not prime");
      tables_.emplace_back(q, n);
    }
    const size_t nb = all_moduli_.size();
    inv_q_.assign(nb, std::vector<u64>(nb, 0));
    for (size_t l = 0; l < nb; ++l)
      for (size_t j = 0; j < nb; ++j)
        if (l != j) inv_q_[l][j] = invmod(all_moduli_[l] % all_moduli_[j],
                                          all_moduli_[j]);
    // Special-prime product helpers for key-switch rescaling.
    if (!params_.special.empty()) {
      p_prod_ = 1;
      for (u64 p : params_.special) p_prod_ *= p;
      for (size_t j = 0; j < params_.moduli.size(); ++j) {
        u64 pm = 1;
        for (u64 p : params_.special) pm = mulmod(pm, p % params_.moduli[j],
                                                  params_.moduli[j]);
        p_mod_q_.push_back(pm);
        p_inv_mod_q_.push_back(invmod(pm, params_.moduli[j]));
      }
      if (params_.special.size() == 2)
        p0_inv_mod_p1_ = invmod(params_.special[0] % params_.special[1],
                                params_.special[1]);
    }
  }

  const RingParams& params() const { return params_; }
  size_t n() const { return params_.n; }
  size_t slots() const { return params_.n / 2; }
  int top_level() const { return static_cast<int>(params_.moduli.size()) - 1; }
  size_t num_special() const { return params_.special.size(); }
  u64 main_modulus(int l) const { return params_.moduli[l]; }

  double log2_q(int level) const {
    double s = 0;
    for (int l = 0; l <= level; ++l) s += std::log2(double(params_.moduli[l]));
    return s;
  }

  // Global base index of local residue r in a poly at `level`.
  size_t base_index(const RingPoly& p, size_t r) const {
    return r < p.nmain() ? r : params_.moduli.size() + (r - p.nmain());
  }
  u64 base_modulus(const RingPoly& p, size_t r) const {
    return all_moduli_[base_index(p, r)];
  }
  const NttTables& base_tables(const RingPoly& p, size_t r) const {
    return tables_[base_index(p, r)];
  }

  RingPoly zero(int level, bool ntt, bool extended = false) const {
    RingPoly p;
    p.level = level;
    p.ntt = ntt;
    p.extended = extended;
    const size_t nres =
        static_cast<size_t>(level) + 1 + (extended ? num_special() : 0);
    p.residues.assign(nres, std::vector<u64>(n(), 0));
    return p;
  }

  void to_ntt(RingPoly& p) const {
    if (p.ntt) return;
    for (size_t r = 0; r < p.nres(); ++r) base_tables(p, r).forward(p.residues[r].data());
    p.ntt = true;
  }

  void to_coeff(RingPoly& p) const {
    if (!p.ntt) return;
    for (size_t r = 0; r < p.nres(); ++r) base_tables(p, r).inverse(p.residues[r].data());
    p.ntt = false;
  }

  void check_compatible(const RingPoly& a, const RingPoly& b) const {
    if (a.level != b.level) throw UsageError("ring op level mismatch");
    if (a.ntt != b.ntt) throw UsageError("ring op domain mismatch");
    if (a.extended != b.extended) throw UsageError("ring op basis mismatch");
  }

  RingPoly add(const RingPoly& a, const RingPoly& b) const {
    check_compatible(a, b);
    RingPoly out = a;
    add_inplace(out, b);
    return out;
  }

  void add_inplace(RingPoly& a, const RingPoly& b) const {
    check_compatible(a, b);
    for (size_t r = 0; r < a.nres(); ++r) {
      const u64 q = base_modulus(a, r);
      u64* pa = a.residues[r].data();
      const u64* pb = b.residues[r].data();
      for (size_t t = 0; t < n(); ++t) pa[t] = addmod(pa[t], pb[t], q);
    }
  }

  RingPoly sub(const RingPoly& a, const RingPoly& b) const {
    check_compatible(a, b);
    RingPoly out = a;
    for (size_t r = 0; r < out.nres(); ++r) {
      const u64 q = base_modulus(out, r);
      u64* pa = out.residues[r].data();
      const u64* pb = b.residues[r].data();
      for (size_t t = 0; t < n(); ++t) pa[t] = submod(pa[t], pb[t], q);
    }
    return out;
  }

  RingPoly negate(const RingPoly& a) const {
    RingPoly out = a;
    for (size_t r = 0; r < out.nres(); ++r) {
      const u64 q = base_modulus(out, r);
      for (u64& x : out.residues[r]) x = x == 0 ? 0 : q - x;
    }
    return out;
  }

  // Pointwise (Hadamard) product; both operands must be in NTT form.
  RingPoly pointwise_mul(const RingPoly& a, const RingPoly& b) const {
    check_compatible(a, b);
    if (!a.ntt) throw UsageError("pointwise_mul needs NTT form");
    RingPoly out = a;
    for (size_t r = 0; r < out.nres(); ++r) {
      const u64 q = base_modulus(out, r);
      u64* pa = out.residues[r].data();
      const u64* pb = b.residues[r].data();
      for (size_t t = 0; t < n(); ++t) pa[t] = mulmod(pa[t], pb[t], q);
    }
    return out;
  }

  void pointwise_mul_acc(const RingPoly& a, const RingPoly& b,
                         RingPoly& acc) const {
    check_compatible(a, b);
    if (!a.ntt || !acc.ntt) throw UsageError("pointwise_mul_acc needs NTT form");
    for (size_t r = 0; r < acc.nres(); ++r) {
      const u64 q = base_modulus(acc, r);
      u64* pc = acc.residues[r].data();
      const u64* pa = a.residues[r].data();
      const u64* pb = b.residues[r].data();
      for (size_t t = 0; t < n(); ++t)
        pc[t] = addmod(pc[t], mulmod(pa[t], pb[t], q), q);
    }
  }

  // Negacyclic product of two coefficient-form polynomials (X^N = -1).
  RingPoly mul(const RingPoly& a, const RingPoly& b) const {
    check_compatible(a, b);
    if (a.ntt) return pointwise_mul(a, b);
    RingPoly na = a, nb = b;
    to_ntt(na);
    to_ntt(nb);
    RingPoly out = pointwise_mul(na, nb);
    to_coeff(out);
    return out;
  }

  // Galois map X -> X^g on a coefficient-form polynomial; g must be odd.
  RingPoly automorphism(const RingPoly& a, u64 g) const {
    if (a.ntt) throw UsageError("automorphism needs coefficient form");
    const size_t nn = n();
    const u64 two_n = 2 * nn;
    RingPoly out = zero(a.level, false, a.extended);
    for (size_t r = 0; r < a.nres(); ++r) {
      const u64 q = base_modulus(a, r);
      const u64* src = a.residues[r].data();
      u64* dst = out.residues[r].data();
      for (size_t t = 0; t < nn; ++t) {
        const u64 j = (static_cast<u128>(t) * g) % two_n;
        if (j < nn)
          dst[j] = src[t];
        else
          dst[j - nn] = src[t] == 0 ? 0 : q - src[t];
      }
    }
    return out;
  }

  // Truncates the moduli chain to `target` (values preserved; lossy by
  // design -- no inverse). Identity when target == current level.
  RingPoly drop_level(const RingPoly& p, int target) const {
    if (p.extended) throw UsageError("drop_level on extended basis");
    if (target > p.level) throw UsageError("drop_level target above current");
    if (target < 0) throw UsageError("drop_level below zero");
    RingPoly out;
    out.level = target;
    out.ntt = p.ntt;
    out.extended = false;
    out.residues.assign(p.residues.begin(), p.residues.begin() + target + 1);
    return out;
  }

  // Divides by q_tau with rounding and drops the top residue (the RNS
  // rescale). Works on NTT-form input and returns NTT form.
  RingPoly rescale_div_last(const RingPoly& p) const {
    if (p.extended) throw UsageError("rescale on extended basis");
    if (p.level < 1) throw MustBootstrapError("rescale at level 0");
    const int lvl = p.level;
    const u64 ql = params_.moduli[lvl];
    // Bring the dropped residue to coefficient form and center it.
    std::vector<u64> last = p.residues[lvl];
    if (p.ntt) tables_[lvl].inverse(last.data());
    std::vector<i64> centered(n());
    for (size_t t = 0; t < n(); ++t) {
      centered[t] = static_cast<i64>(last[t]);
      if (last[t] > ql / 2) centered[t] -= static_cast<i64>(ql);
    }
    RingPoly out = zero(lvl - 1, p.ntt);
    std::vector<u64> corr(n());
    for (int j = 0; j < lvl; ++j) {
      const u64 qj = params_.moduli[j];
      for (size_t t = 0; t < n(); ++t) {
        i64 c = centered[t] % static_cast<i64>(qj);
        corr[t] = c < 0 ? static_cast<u64>(c + static_cast<i64>(qj))
                        : static_cast<u64>(c);
      }
      if (p.ntt) tables_[j].forward(corr.data());
      const u64 inv = inv_q_[lvl][j];
      const u64 inv_shoup = shoup_of(inv, qj);
      const u64* src = p.residues[j].data();
      u64* dst = out.residues[j].data();
      for (size_t t = 0; t < n(); ++t)
        dst[t] = mulmod_shoup(submod(src[t], corr[t], qj), inv, inv_shoup, qj);
    }
    return out;
  }

  // Divides an extended-basis accumulator by the special-prime product P
  // (with rounding) and lands on the main chain. NTT in, NTT out.
  RingPoly div_by_special(const RingPoly& p) const {
    if (!p.extended) throw UsageError("div_by_special needs extended basis");
    const size_t ns = num_special();
    if (ns == 0 || ns > 2) throw ParameterError("special prime count unsupported");
    const int lvl = p.level;
    // Special residues to coefficient form.
    std::vector<std::vector<u64>> sp(ns, std::vector<u64>(n()));
    for (size_t s = 0; s < ns; ++s) {
      sp[s] = p.residues[p.nmain() + s];
      if (p.ntt) tables_[params_.moduli.size() + s].inverse(sp[s].data());
    }
    // Centered CRT lift of [p]_P per coefficient.
    std::vector<i128> lift(n());
    if (ns == 1) {
      const u64 p0 = params_.special[0];
      for (size_t t = 0; t < n(); ++t) {
        i128 v = sp[0][t];
        if (sp[0][t] > p0 / 2) v -= p0;
        lift[t] = v;
      }
    } else {
      const u64 p0 = params_.special[0], p1 = params_.special[1];
      const u128 big_p = static_cast<u128>(p0) * p1;
      for (size_t t = 0; t < n(); ++t) {
        const u64 r0 = sp[0][t];
        const u64 r1 = sp[1][t];
        const u64 diff = submod(r1, r0 % p1, p1);
        const u64 k = mulmod(diff, p0_inv_mod_p1_, p1);
        u128 v = static_cast<u128>(k) * p0 + r0;
        i128 c = static_cast<i128>(v);
        if (v > big_p / 2) c -= static_cast<i128>(big_p);
        lift[t] = c;
      }
    }
    RingPoly out = zero(lvl, p.ntt);
    std::vector<u64> corr(n());
    for (int j = 0; j <= lvl; ++j) {
      const u64 qj = params_.moduli[j];
      for (size_t t = 0; t < n(); ++t) {
        i128 c = lift[t] % static_cast<i128>(qj);
        if (c < 0) c += qj;
        corr[t] = static_cast<u64>(c);
      }
      if (p.ntt) tables_[j].forward(corr.data());
      const u64 inv = p_inv_mod_q_[j];
      const u64 inv_shoup = shoup_of(inv, qj);
      const u64* src = p.residues[j].data();
      u64* dst = out.residues[j].data();
      for (size_t t = 0; t < n(); ++t)
        dst[t] = mulmod_shoup(submod(src[t], corr[t], qj), inv, inv_shoup, qj);
    }
    return out;
  }

  // ---- Samplers (all reproducible from the supplied Prng) ----

  RingPoly sample_uniform(int level, Prng& prng, bool extended = false) const {
    RingPoly p = zero(level, true, extended);
    for (size_t r = 0; r < p.nres(); ++r) {
      const u64 q = base_modulus(p, r);
      for (u64& x : p.residues[r]) x = prng.uniform_below(q);
    }
    return p;
  }

  // Builds a poly (coefficient form) from small signed integer coefficients.
  RingPoly from_signed_coeffs(const std::vector<i64>& c, int level,
                              bool extended = false) const {
    RingPoly p = zero(level, false, extended);
    for (size_t r = 0; r < p.nres(); ++r) {
      const u64 q = base_modulus(p, r);
      for (size_t t = 0; t < n(); ++t) {
        i64 v = c[t] % static_cast<i64>(q);
        p.residues[r][t] =
            v < 0 ? static_cast<u64>(v + static_cast<i64>(q)) : static_cast<u64>(v);
      }
    }
    return p;
  }

  RingPoly from_signed_coeffs128(const std::vector<i128>& c, int level,
                                 bool extended = false) const {
    RingPoly p = zero(level, false, extended);
    for (size_t r = 0; r < p.nres(); ++r) {
      const u64 q = base_modulus(p, r);
      for (size_t t = 0; t < n(); ++t) {
        i128 v = c[t] % static_cast<i128>(q);
        if (v < 0) v += q;
        p.residues[r][t] = static_cast<u64>(v);
      }
    }
    return p;
  }

  // Discrete Gaussian of std eta, tail cut at 6*eta.
  std::vector<i64> sample_gaussian_coeffs(double eta, Prng& prng) const {
    std::vector<i64> c(n());
    const double cut = 6.0 * eta;
    for (size_t t = 0; t < n(); ++t) {
      double g = prng.normal(eta);
      if (g > cut) g = cut;
      if (g < -cut) g = -cut;
      c[t] = static_cast<i64>(std::llround(g));
    }
    return c;
  }

  RingPoly sample_gaussian(double eta, int level, Prng& prng,
                           bool extended = false) const {
    return from_signed_coeffs(sample_gaussian_coeffs(eta, prng), level, extended);
  }

  std::vector<i64> sample_ternary_coeffs(Prng& prng) const {
    std::vector<i64> c(n());
    for (size_t t = 0; t < n(); ++t)
      c[t] = static_cast<i64>(prng.uniform_below(3)) - 1;
    return c;
  }

  RingPoly sample_ternary(int level, Prng& prng, bool extended = false) const {
    return from_signed_coeffs(sample_ternary_coeffs(prng), level, extended);
  }

  // Mask coefficients uniform in [0, 2^bits), centered to
  // [-2^(bits-1), 2^(bits-1)).
  std::vector<i64> sample_bounded_coeffs(int bits, Prng& prng) const {
    if (bits < 1 || bits > 62) throw ParameterError("mask bound out of range");
    std::vector<i64> c(n());
    const u64 span = u64(1) << bits;
    const i64 half = i64(1) << (bits - 1);
    for (size_t t = 0; t < n(); ++t)
      c[t] = static_cast<i64>(prng.uniform_below(span)) - half;
    return c;
  }

  // Wide variant for masks beyond 62 bits.
  std::vector<i128> sample_bounded_coeffs128(int bits, Prng& prng) const {
    if (bits < 1 || bits > 100) throw ParameterError("mask bound out of range");
    if (bits <= 62) {
      auto narrow = sample_bounded_coeffs(bits, prng);
      return std::vector<i128>(narrow.begin(), narrow.end());
    }
    std::vector<i128> c(n());
    const u128 mask = (u128(1) << bits) - 1;
    const i128 half = i128(1) << (bits - 1);
    for (size_t t = 0; t < n(); ++t) {
      const u128 wide =
          (u128(prng.next_u64()) << 64 | prng.next_u64()) & mask;
      c[t] = static_cast<i128>(wide) - half;
    }
    return c;
  }

  // Centered lift of small coefficients using (up to) the first two main
  // residues. Valid whenever |value| < q_0*q_1/2, which the mask-bound
  // invariant guarantees for everything this library decodes.
  std::vector<i128> centered_coeffs(const RingPoly& p) const {
    if (p.ntt) throw UsageError("centered_coeffs needs coefficient form");
    std::vector<i128> out(n());
    const u64 q0 = params_.moduli[0];
    if (p.level == 0) {
      for (size_t t = 0; t < n(); ++t) {
        i128 v = p.residues[0][t];
        if (p.residues[0][t] > q0 / 2) v -= q0;
        out[t] = v;
      }
      return out;
    }
    const u64 q1 = params_.moduli[1];
    const u64 q0_inv_q1 = inv_q_[0][1];
    const u128 q01 = static_cast<u128>(q0) * q1;
    for (size_t t = 0; t < n(); ++t) {
      const u64 r0 = p.residues[0][t];
      const u64 r1 = p.residues[1][t];
      const u64 diff = submod(r1, r0 % q1, q1);
      const u64 k = mulmod(diff, q0_inv_q1, q1);
      const u128 v = static_cast<u128>(k) * q0 + r0;
      i128 c = static_cast<i128>(v);
      if (v > q01 / 2) c -= static_cast<i128>(q01);
      out[t] = c;
    }
    return out;
  }

 private:
  RingParams params_;
  std::vector<u64> all_moduli_;
  std::vector<NttTables> tables_;
  std::vector<std::vector<u64>> inv_q_;  // inv_q_[l][j] = q_l^{-1} mod q_j
  std::vector<u64> p_mod_q_, p_inv_mod_q_;
  u128 p_prod_ = 1;
  u64 p0_inv_mod_p1_ = 0;

 public:
  u64 p_mod_q(int j) const { return p_mod_q_[j]; }
  double log2_p() const {
    double s = 0;
    for (u64 p : params_.special) s += std::log2(double(p));
    return s;
  }
};

}  // namespace loom
