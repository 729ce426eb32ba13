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

#include <algorithm>
#include <complex>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "loom/errors.hpp"
#include "loom/numth.hpp"
#include "loom/prng.hpp"
#include "loom/ring.hpp"

namespace loom {

// Leveled approximate-arithmetic parameters on top of a ring.
struct CryptoParams {
  RingParams ring;
  double delta = double(1ULL << 30);  // plaintext scale
  int tau_b = 1;                      // minimum level for distributed bootstrap
  int lambda = 30;                    // statistical masking parameter
  // Declared encoding tolerance for this parameter set; measured once and
  // frozen by the regression tests.
  double eps_enc = 1e-9;
};

struct Plaintext {
  RingPoly poly;  // NTT form, main basis
  double scale = 1.0;
  int level() const { return poly.level; }
};

struct Ciphertext {
  std::vector<RingPoly> polys;  // 2 (or 3 before relinearization), NTT form
  double scale = 1.0;
  int level() const { return polys.empty() ? -1 : polys[0].level; }
  size_t size() const { return polys.size(); }
};

struct SecretKey {
  RingPoly s_ntt;              // extended basis, level L, NTT form
  std::vector<i64> s_coeffs;   // ternary coefficients (for Galois transforms)
};

struct PublicKey {
  RingPoly p0, p1;  // main basis, level L, NTT form
};

// One key-switching key: per-digit pairs over the extended basis.
struct KswKey {
  std::vector<RingPoly> k0, k1;
  bool empty() const { return k0.empty(); }
};

using RelinKey = KswKey;

struct RotationKeySet {
  std::map<u64, KswKey> by_galois;  // galois element -> key
};

struct OpCounters {
  u64 adds = 0;
  u64 plain_mults = 0;
  u64 mults = 0;
  u64 relins = 0;
  u64 rescales = 0;
  u64 rotations = 0;
  u64 rerandomizations = 0;
  u64 bootstraps = 0;

  OpCounters diff(const OpCounters& earlier) const {
    OpCounters d;
    d.adds = adds - earlier.adds;
    d.plain_mults = plain_mults - earlier.plain_mults;
    d.mults = mults - earlier.mults;
    d.relins = relins - earlier.relins;
    d.rescales = rescales - earlier.rescales;
    d.rotations = rotations - earlier.rotations;
    d.rerandomizations = rerandomizations - earlier.rerandomizations;
    d.bootstraps = bootstraps - earlier.bootstraps;
    return d;
  }
};

// Canonical-embedding codec: slots live at the odd 2N-th roots indexed by
// powers of five; the transform is one twisted length-N complex FFT.
class Embedding {
 public:
  explicit Embedding(size_t n) : n_(n) {
    const double pi = 3.14159265358979323846264338328;
    roots_.resize(n_);
    for (size_t k = 0; k < n_; ++k) {
      const double ang = 2.0 * pi * double(k) / double(n_);
      roots_[k] = {std::cos(ang), std::sin(ang)};
    }
    twist_.resize(n_);
    for (size_t t = 0; t < n_; ++t) {
      const double ang = pi * double(t) / double(n_);
      twist_[t] = {std::cos(ang), std::sin(ang)};
    }
    slot_index_.resize(n_ / 2);
    u64 pow5 = 1;
    const u64 two_n = 2 * n_;
    for (size_t j = 0; j < n_ / 2; ++j) {
      slot_index_[j] = static_cast<size_t>((pow5 - 1) / 2);
      pow5 = (pow5 * 5) % two_n;
    }
  }

  size_t slots() const { return n_ / 2; }

  // Evaluations p(zeta^{2r+1}) for r = 0..n-1, from real coefficients.
  std::vector<std::complex<double>> evaluate(std::span<const double> coeffs) const {
    std::vector<std::complex<double>> a(n_);
    for (size_t t = 0; t < n_; ++t) a[t] = coeffs[t] * twist_[t];
    fft(a, /*inverse_sign=*/false);
    return a;
  }

  // Real coefficients whose evaluations hit `slot_values` at the slot roots
  // (conjugate symmetry filled in automatically).
  std::vector<double> interpolate(std::span<const double> slot_values) const {
    std::vector<std::complex<double>> y(n_, {0.0, 0.0});
    for (size_t j = 0; j < slot_values.size(); ++j) {
      const size_t r = slot_index_[j];
      y[r] = {slot_values[j], 0.0};
      y[n_ - 1 - r] = {slot_values[j], 0.0};
    }
    fft(y, /*inverse_sign=*/true);
    std::vector<double> coeffs(n_);
    for (size_t t = 0; t < n_; ++t) {
      const std::complex<double> c =
          y[t] * std::conj(twist_[t]) / double(n_);
      coeffs[t] = c.real();
    }
    return coeffs;
  }

  std::complex<double> slot_value(const std::vector<std::complex<double>>& evals,
                                  size_t j) const {
    return evals[slot_index_[j]];
  }

 private:
  // Radix-2 in-place FFT. Forward uses exp(+2*pi*i*k/n) to match evaluate().
  void fft(std::vector<std::complex<double>>& a, bool inverse_sign) const {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
      size_t bit = n >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
      const size_t stride = n_ / len;
      for (size_t i = 0; i < n; i += len) {
        for (size_t j = 0; j < len / 2; ++j) {
          std::complex<double> w = roots_[j * stride];
          if (inverse_sign) w = std::conj(w);
          const auto u = a[i + j];
          const auto v = a[i + j + len / 2] * w;
          a[i + j] = u + v;
          a[i + j + len / 2] = u - v;
        }
      }
    }
  }

  size_t n_;
  std::vector<std::complex<double>> roots_, twist_;
  std::vector<size_t> slot_index_;
};

class CkksContext {
 public:
  explicit CkksContext(CryptoParams params)
      : cp_(std::move(params)), ring_(cp_.ring), emb_(cp_.ring.n) {
    for (u64 q : cp_.ring.moduli)
      if (cp_.delta >= double(q))
        throw ParameterError("scale must stay below every chain modulus");
    if (cp_.tau_b < 1) throw ParameterError("tau_b must be >= 1");
    if (ring_.num_special() == 0)
      throw ParameterError("key switching needs at least one special prime");
  }

  const CryptoParams& params() const { return cp_; }
  const RingContext& ring() const { return ring_; }
  const Embedding& embedding() const { return emb_; }
  size_t slots() const { return ring_.slots(); }
  int top_level() const { return ring_.top_level(); }
  double delta() const { return cp_.delta; }
  OpCounters& counters() const { return counters_; }

  // ---- Encoding ----

  Plaintext encode(std::span<const double> values, double scale,
                   int level) const {
    if (values.size() > slots()) throw UsageError("too many slot values");
    if (level < 0 || level > top_level()) throw UsageError("bad encode level");
    std::vector<double> padded(slots(), 0.0);
    std::copy(values.begin(), values.end(), padded.begin());
    std::vector<double> coeffs = emb_.interpolate(padded);
    std::vector<i128> rounded(ring_.n());
    const double qbound = double(ring_.main_modulus(0));
    for (size_t t = 0; t < coeffs.size(); ++t) {
      const double x = coeffs[t] * scale;
      if (std::abs(x) > qbound * 0.45)
        throw PrecisionError("encoded value overflows modulus");
      rounded[t] = static_cast<i128>(std::llround(x));
    }
    Plaintext pt;
    pt.poly = ring_.from_signed_coeffs128(rounded, level);
    ring_.to_ntt(pt.poly);
    pt.scale = scale;
    return pt;
  }

  Plaintext encode_constant(double c, double scale, int level) const {
    std::vector<double> v(slots(), c);
    return encode(v, scale, level);
  }

  std::vector<double> decode(const Plaintext& pt) const {
    RingPoly p = pt.poly;
    ring_.to_coeff(p);
    std::vector<i128> centered = ring_.centered_coeffs(p);
    std::vector<double> coeffs(ring_.n());
    for (size_t t = 0; t < coeffs.size(); ++t)
      coeffs[t] = double(static_cast<long double>(centered[t]) / pt.scale);
    auto evals = emb_.evaluate(coeffs);
    std::vector<double> out(slots());
    for (size_t j = 0; j < slots(); ++j)
      out[j] = emb_.slot_value(evals, j).real();
    return out;
  }

  // ---- Key generation (single party; the multiparty layer builds the same
  // structures interactively) ----

  SecretKey gen_secret_key(Prng& prng) const {
    SecretKey sk;
    sk.s_coeffs = ring_.sample_ternary_coeffs(prng);
    sk.s_ntt = ring_.from_signed_coeffs(sk.s_coeffs, top_level(), true);
    ring_.to_ntt(sk.s_ntt);
    return sk;
  }

  PublicKey gen_public_key(const SecretKey& sk, Prng& prng) const {
    PublicKey pk;
    pk.p1 = ring_.sample_uniform(top_level(), prng);
    RingPoly e = ring_.sample_gaussian(cp_.ring.eta, top_level(), prng);
    ring_.to_ntt(e);
    RingPoly s = main_secret(sk, top_level());
    pk.p0 = ring_.add(ring_.negate(ring_.pointwise_mul(pk.p1, s)), e);
    return pk;
  }

  // Key that switches decryption under `extra` to decryption under `s`.
  KswKey make_ksw_key(const SecretKey& sk, const RingPoly& extra_ntt_ext,
                      Prng& prng) const {
    KswKey key;
    const int L = top_level();
    for (int digit = 0; digit <= L; ++digit) {
      RingPoly a = ring_.sample_uniform(L, prng, /*extended=*/true);
      RingPoly e = ring_.sample_gaussian(cp_.ring.eta, L, prng, true);
      ring_.to_ntt(e);
      RingPoly k0 = ring_.add(ring_.negate(ring_.pointwise_mul(a, sk.s_ntt)), e);
      // Add P * w_digit * extra: only the digit's own residue is touched.
      const u64 q = cp_.ring.moduli[digit];
      const u64 pm = ring_.p_mod_q(digit);
      u64* dst = k0.residues[digit].data();
      const u64* src = extra_ntt_ext.residues[digit].data();
      for (size_t t = 0; t < ring_.n(); ++t)
        dst[t] = addmod(dst[t], mulmod(pm, src[t], q), q);
      key.k0.push_back(std::move(k0));
      key.k1.push_back(std::move(a));
    }
    return key;
  }

  RelinKey gen_relin_key(const SecretKey& sk, Prng& prng) const {
    RingPoly s2 = ring_.pointwise_mul(sk.s_ntt, sk.s_ntt);
    return make_ksw_key(sk, s2, prng);
  }

  u64 galois_left(size_t r) const {
    const u64 two_n = 2 * ring_.n();
    u64 g = 1;
    for (size_t i = 0; i < r % slots(); ++i) g = (g * 5) % two_n;
    return g;
  }

  u64 galois_right(size_t r) const {
    // Inverse of the left map: right by r == left by slots - r.
    return galois_left((slots() - (r % slots())) % slots());
  }

  // Eagerly generates keys for every power-of-two step, both directions.
  RotationKeySet gen_rotation_keys(const SecretKey& sk, Prng& prng) const {
    RotationKeySet set;
    for (size_t step = 1; step < slots(); step <<= 1) {
      for (u64 g : {galois_left(step), galois_right(step)}) {
        if (set.by_galois.count(g)) continue;
        set.by_galois.emplace(g, make_galois_key(sk, g, prng));
      }
    }
    return set;
  }

  KswKey make_galois_key(const SecretKey& sk, u64 g, Prng& prng) const {
    RingPoly s_coeff = ring_.from_signed_coeffs(sk.s_coeffs, top_level(), true);
    RingPoly sg = ring_.automorphism(s_coeff, g);
    ring_.to_ntt(sg);
    return make_ksw_key(sk, sg, prng);
  }

  // ---- Encryption ----

  Ciphertext encrypt(const Plaintext& pt, const PublicKey& pk,
                     Prng& prng) const {
    const int lvl = pt.level();
    RingPoly u = ring_.sample_ternary(lvl, prng);
    ring_.to_ntt(u);
    RingPoly e0 = ring_.sample_gaussian(cp_.ring.eta, lvl, prng);
    ring_.to_ntt(e0);
    RingPoly e1 = ring_.sample_gaussian(cp_.ring.eta, lvl, prng);
    ring_.to_ntt(e1);
    RingPoly p0 = ring_.drop_level(pk.p0, lvl);
    RingPoly p1 = ring_.drop_level(pk.p1, lvl);
    Ciphertext ct;
    ct.scale = pt.scale;
    ct.polys.push_back(ring_.add(ring_.add(ring_.pointwise_mul(u, p0), e0),
                                 pt.poly));
    ct.polys.push_back(ring_.add(ring_.pointwise_mul(u, p1), e1));
    return ct;
  }

  Ciphertext encrypt_zero(double scale, int level, const PublicKey& pk,
                          Prng& prng) const {
    std::vector<double> zeros;
    return encrypt(encode(zeros, scale, level), pk, prng);
  }

  Plaintext decrypt(const Ciphertext& ct, const SecretKey& sk) const {
    RingPoly s = main_secret(sk, ct.level());
    RingPoly acc = ct.polys[0];
    RingPoly power = s;
    for (size_t i = 1; i < ct.polys.size(); ++i) {
      ring_.add_inplace(acc, ring_.pointwise_mul(ct.polys[i], power));
      if (i + 1 < ct.polys.size()) power = ring_.pointwise_mul(power, s);
    }
    Plaintext pt;
    pt.poly = std::move(acc);
    pt.scale = ct.scale;
    return pt;
  }

  std::vector<double> decrypt_values(const Ciphertext& ct,
                                     const SecretKey& sk) const {
    return decode(decrypt(ct, sk));
  }

  // ---- Scheme operations ----

  static bool scales_match(double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b));
  }

  Ciphertext add(const Ciphertext& a, const Ciphertext& b) const {
    if (!scales_match(a.scale, b.scale))
      throw UsageError("add: operand scales differ");
    const int lvl = std::min(a.level(), b.level());
    Ciphertext x = drop_to_level(a, lvl);
    Ciphertext y = drop_to_level(b, lvl);
    Ciphertext out;
    out.scale = std::max(a.scale, b.scale);
    const size_t sz = std::max(x.size(), y.size());
    for (size_t i = 0; i < sz; ++i) {
      if (i < x.size() && i < y.size())
        out.polys.push_back(ring_.add(x.polys[i], y.polys[i]));
      else
        out.polys.push_back(i < x.size() ? x.polys[i] : y.polys[i]);
    }
    counters_.adds++;
    return out;
  }

  Ciphertext sub(const Ciphertext& a, const Ciphertext& b) const {
    return add(a, negate(b));
  }

  Ciphertext negate(const Ciphertext& a) const {
    Ciphertext out = a;
    for (auto& p : out.polys) p = ring_.negate(p);
    return out;
  }

  Ciphertext add_plain(const Ciphertext& a, const Plaintext& p) const {
    if (!scales_match(a.scale, p.scale))
      throw UsageError("add_plain: scale mismatch");
    if (p.level() < a.level()) throw UsageError("add_plain: plaintext level too low");
    Ciphertext out = a;
    ring_.add_inplace(out.polys[0], ring_.drop_level(p.poly, a.level()));
    counters_.adds++;
    return out;
  }

  Ciphertext sub_plain(const Ciphertext& a, const Plaintext& p) const {
    if (!scales_match(a.scale, p.scale))
      throw UsageError("sub_plain: scale mismatch");
    Ciphertext out = a;
    out.polys[0] = ring_.sub(out.polys[0], ring_.drop_level(p.poly, a.level()));
    counters_.adds++;
    return out;
  }

  Ciphertext mult_plain(const Ciphertext& a, const Plaintext& p) const {
    if (a.level() == 0) throw MustBootstrapError("mult_plain at level 0");
    const int lvl = std::min(a.level(), p.level());
    Ciphertext out = drop_to_level(a, lvl);
    RingPoly pp = ring_.drop_level(p.poly, lvl);
    for (auto& c : out.polys) c = ring_.pointwise_mul(c, pp);
    out.scale = a.scale * p.scale;
    counters_.plain_mults++;
    return out;
  }

  // Ciphertext-ciphertext product; returns a size-3 ciphertext.
  Ciphertext mult(const Ciphertext& a, const Ciphertext& b) const {
    if (a.level() == 0 || b.level() == 0)
      throw MustBootstrapError("mult at level 0");
    if (a.size() != 2 || b.size() != 2)
      throw UsageError("mult requires size-2 operands (relinearize first)");
    const int lvl = std::min(a.level(), b.level());
    Ciphertext x = drop_to_level(a, lvl);
    Ciphertext y = drop_to_level(b, lvl);
    Ciphertext out;
    out.scale = a.scale * b.scale;
    out.polys.push_back(ring_.pointwise_mul(x.polys[0], y.polys[0]));
    RingPoly mid = ring_.pointwise_mul(x.polys[0], y.polys[1]);
    ring_.add_inplace(mid, ring_.pointwise_mul(x.polys[1], y.polys[0]));
    out.polys.push_back(std::move(mid));
    out.polys.push_back(ring_.pointwise_mul(x.polys[1], y.polys[1]));
    counters_.mults++;
    return out;
  }

  Ciphertext relinearize(const Ciphertext& a, const RelinKey& rlk) const {
    if (a.size() != 3) throw UsageError("relinearize requires a size-3 input");
    if (rlk.empty()) throw KeyError("relinearization key missing");
    RingPoly c2 = a.polys[2];
    ring_.to_coeff(c2);
    auto [u0, u1] = key_switch(c2, rlk);
    Ciphertext out;
    out.scale = a.scale;
    out.polys.push_back(ring_.add(a.polys[0], u0));
    out.polys.push_back(ring_.add(a.polys[1], u1));
    counters_.relins++;
    return out;
  }

  Ciphertext mult_relin(const Ciphertext& a, const Ciphertext& b,
                        const RelinKey& rlk) const {
    return relinearize(mult(a, b), rlk);
  }

  Ciphertext rescale(const Ciphertext& a) const {
    if (a.level() < 1) throw MustBootstrapError("rescale at level 0");
    Ciphertext out;
    out.scale = a.scale / double(ring_.main_modulus(a.level()));
    for (const auto& p : a.polys) out.polys.push_back(ring_.rescale_div_last(p));
    counters_.rescales++;
    return out;
  }

  Ciphertext drop_to_level(const Ciphertext& a, int lvl) const {
    if (lvl == a.level()) return a;
    Ciphertext out;
    out.scale = a.scale;
    for (const auto& p : a.polys) out.polys.push_back(ring_.drop_level(p, lvl));
    return out;
  }

  // One Galois step (rotation key must exist for g).
  Ciphertext apply_galois(const Ciphertext& a, u64 g,
                          const RotationKeySet& rks) const {
    auto it = rks.by_galois.find(g);
    if (it == rks.by_galois.end()) throw KeyError("missing rotation key");
    if (a.size() != 2) throw UsageError("rotate requires size-2 ciphertext");
    RingPoly c0 = a.polys[0], c1 = a.polys[1];
    ring_.to_coeff(c0);
    ring_.to_coeff(c1);
    RingPoly a0 = ring_.automorphism(c0, g);
    RingPoly a1 = ring_.automorphism(c1, g);
    ring_.to_ntt(a0);
    auto [u0, u1] = key_switch(a1, it->second);
    Ciphertext out;
    out.scale = a.scale;
    out.polys.push_back(ring_.add(a0, u0));
    out.polys.push_back(std::move(u1));
    counters_.rotations++;
    return out;
  }

  // Cyclic slot rotation; arbitrary amounts decompose into the power-of-two
  // steps the key set carries.
  Ciphertext rotate_left(const Ciphertext& a, size_t r,
                         const RotationKeySet& rks) const {
    r %= slots();
    Ciphertext out = a;
    for (size_t step = 1; r != 0; step <<= 1) {
      if (r & step) {
        out = apply_galois(out, galois_left(step), rks);
        r -= step;
      }
    }
    return out;
  }

  Ciphertext rotate_right(const Ciphertext& a, size_t r,
                          const RotationKeySet& rks) const {
    r %= slots();
    Ciphertext out = a;
    for (size_t step = 1; r != 0; step <<= 1) {
      if (r & step) {
        out = apply_galois(out, galois_right(step), rks);
        r -= step;
      }
    }
    return out;
  }

  // Fresh encryption of zero added in; decrypts identically, new randomness.
  Ciphertext rerandomize(const Ciphertext& a, const PublicKey& pk,
                         Prng& prng) const {
    Ciphertext z = encrypt_zero(a.scale, a.level(), pk, prng);
    counters_.rerandomizations++;
    OpCounters& c = counters_;
    Ciphertext out = add(a, z);
    c.adds--;  // internal add, not caller-visible arithmetic
    return out;
  }

  // Dot product DM: slotwise product then log2(a) fold-rotations; slot 0
  // (and every a-th slot) ends up holding the inner product of the first
  // a slots.
  Ciphertext dm(const Ciphertext& x, const Plaintext& row, size_t a,
                const RotationKeySet& rks) const {
    Ciphertext prod = rescale(mult_plain(x, row));
    return fold_sum(prod, a, rks);
  }

  Ciphertext dm(const Ciphertext& x, const Ciphertext& row, size_t a,
                const RotationKeySet& rks, const RelinKey& rlk) const {
    Ciphertext prod = rescale(mult_relin(x, row, rlk));
    return fold_sum(prod, a, rks);
  }

  Ciphertext fold_sum(const Ciphertext& x, size_t a,
                      const RotationKeySet& rks) const {
    if (!is_power_of_two(a)) throw UsageError("dm length must be a power of two");
    Ciphertext acc = x;
    for (size_t step = 1; step < a; step <<= 1)
      acc = add(acc, rotate_left(acc, step, rks));
    return acc;
  }

  RingPoly main_secret(const SecretKey& sk, int level) const {
    RingPoly s;
    s.level = level;
    s.ntt = true;
    s.extended = false;
    s.residues.assign(sk.s_ntt.residues.begin(),
                      sk.s_ntt.residues.begin() + level + 1);
    return s;
  }

  // Hybrid RNS key switch of a coefficient-form poly; returns the NTT-form
  // (out0, out1) contribution pair after division by the special primes.
  std::pair<RingPoly, RingPoly> key_switch(const RingPoly& d_coeff,
                                           const KswKey& key) const {
    if (d_coeff.ntt) throw UsageError("key_switch input must be coefficient form");
    const int lvl = d_coeff.level;
    const size_t ns = ring_.num_special();
    const size_t nb = static_cast<size_t>(lvl) + 1 + ns;
    RingPoly acc0 = ring_.zero(lvl, true, true);
    RingPoly acc1 = ring_.zero(lvl, true, true);
    std::vector<u64> dtmp(ring_.n());
    const size_t key_main = key.k0[0].nmain();  // L + 1
    for (int digit = 0; digit <= lvl; ++digit) {
      const std::vector<u64>& dsrc = d_coeff.residues[digit];
      for (size_t r = 0; r < nb; ++r) {
        const u64 qb = ring_.base_modulus(acc0, r);
        for (size_t t = 0; t < ring_.n(); ++t) dtmp[t] = dsrc[t] % qb;
        ring_.base_tables(acc0, r).forward(dtmp.data());
        // Map accumulator residue r to the key's residue index.
        const size_t kr = r <= static_cast<size_t>(lvl)
                              ? r
                              : key_main + (r - (static_cast<size_t>(lvl) + 1));
        const u64* k0 = key.k0[digit].residues[kr].data();
        const u64* k1 = key.k1[digit].residues[kr].data();
        u64* a0 = acc0.residues[r].data();
        u64* a1 = acc1.residues[r].data();
        for (size_t t = 0; t < ring_.n(); ++t) {
          a0[t] = addmod(a0[t], mulmod(dtmp[t], k0[t], qb), qb);
          a1[t] = addmod(a1[t], mulmod(dtmp[t], k1[t], qb), qb);
        }
      }
    }
    return {ring_.div_by_special(acc0), ring_.div_by_special(acc1)};
  }

 private:
  CryptoParams cp_;
  RingContext ring_;
  Embedding emb_;
  mutable OpCounters counters_;
};

// Full single-party key bundle.
struct KeyChain {
  SecretKey sk;
  PublicKey pk;
  RelinKey rlk;
  RotationKeySet rks;
};

inline KeyChain keygen(const CkksContext& ctx, Prng& prng) {
  KeyChain kc;
  kc.sk = ctx.gen_secret_key(prng);
  kc.pk = ctx.gen_public_key(kc.sk, prng);
  kc.rlk = ctx.gen_relin_key(kc.sk, prng);
  kc.rks = ctx.gen_rotation_keys(kc.sk, prng);
  return kc;
}

}  // namespace loom
