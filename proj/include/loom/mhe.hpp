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
//
// Multiparty layer: the secret key is additively shared across parties;
// public material is produced by interactive protocols, and ciphertexts are
// refreshed by a two-round masked re-encryption instead of a centralized
// bootstrap.

#pragma once

#include <utility>
#include <vector>

#include "loom/ckks.hpp"
#include "loom/partysim.hpp"
#include "loom/serialize.hpp"

namespace loom {

struct SecretKeyShare {
  int party_id = 0;
  SecretKey key;  // additive share s_i; never leaves the party
};

// Bound specification for the bootstrap masks: coefficients are uniform in
// [0, 2^(lambda+delta)), centered. delta bounds the encoded message.
struct MaskSpec {
  int lambda = 30;
  int delta_bound = 40;
  int bits() const { return lambda + delta_bound; }
};

// log2 bound on encoded-message coefficients: scale * |values|, plus slack
// for the embedding spread.
inline int delta_bound_for(double scale, double value_range) {
  return int(std::ceil(std::log2(scale * std::max(1.0, value_range)))) + 6;
}

struct CollectiveKeys {
  PublicKey pk;
  RelinKey rlk;
  RotationKeySet rks;
};

class MheSession {
 public:
  MheSession(const CkksContext& ctx, Topology topo, Transport* transport,
             u64 crs_seed)
      : ctx_(ctx),
        topo_(std::move(topo)),
        tr_(transport),
        crs_(crs_seed) {
    topo_.validate();
  }

  const Topology& topology() const { return topo_; }

  static std::vector<SecretKeyShare> gen_shares(const CkksContext& ctx,
                                                size_t n_parties, Prng& prng) {
    std::vector<SecretKeyShare> shares(n_parties);
    for (size_t i = 0; i < n_parties; ++i) {
      Prng local = prng.fork("share", i);
      shares[i].party_id = int(i);
      shares[i].key = ctx.gen_secret_key(local);
    }
    return shares;
  }

  // The mask-bound invariant: |S| * 2^(lambda+delta) must stay inside the
  // two lowest chain primes (which also guarantees the centered lift used
  // to re-encode the masked plaintext is exact).
  void validate_mask_bound(const MaskSpec& spec, size_t n_parties) const {
    const double need = double(spec.bits()) +
                        std::ceil(std::log2(double(n_parties))) + 1.0;
    const double have = ctx_.ring().log2_q(std::min(1, ctx_.top_level()));
    if (need >= have)
      throw ParameterError("mask bound violated: |S|*2^(lambda+delta) "
                           "exceeds the bootstrap-level modulus");
    if (spec.bits() > 100) throw ParameterError("mask bound too wide");
  }

  // ---- DKeyGen ----

  CollectiveKeys dkeygen(const std::vector<SecretKeyShare>& shares,
                         Prng& noise) {
    const int L = ctx_.top_level();
    const auto& ring = ctx_.ring();
    const size_t n = shares.size();
    if (n != topo_.size()) throw ProtocolAbort("party count mismatch");
    CollectiveKeys out;

    // Collective encryption key: one aggregation round over the CRS.
    Prng crs_pk = crs_.fork("pk");
    RingPoly a = ring.sample_uniform(L, crs_pk);
    std::vector<std::vector<RingPoly>> pk_shares(n);
    for (size_t i = 0; i < n; ++i) {
      Prng pn = noise.fork("pk-noise", i);
      RingPoly e = ring.sample_gaussian(ctx_.params().ring.eta, L, pn);
      ring.to_ntt(e);
      RingPoly s = ctx_.main_secret(shares[i].key, L);
      pk_shares[i] = {ring.add(ring.negate(ring.pointwise_mul(a, s)), e)};
    }
    auto pk_sum = aggregate_up(pk_shares, Protocol::kKeygenPk, 1);
    out.pk.p0 = std::move(pk_sum[0]);
    out.pk.p1 = a;

    // Collective relinearization key: two rounds per digit.
    out.rlk = dkeygen_relin(shares, noise);

    // Collective rotation keys: one round per Galois element.
    for (size_t step = 1; step < ctx_.slots(); step <<= 1) {
      for (u64 g : {ctx_.galois_left(step), ctx_.galois_right(step)}) {
        if (out.rks.by_galois.count(g)) continue;
        out.rks.by_galois.emplace(g, dkeygen_rotation(shares, g, noise));
      }
    }
    return out;
  }

  // ---- DDec ----

  std::vector<double> ddec(const Ciphertext& ct,
                           const std::vector<SecretKeyShare>& shares,
                           int smudge_bits, Prng& noise) {
    if (ct.size() != 2) throw UsageError("ddec requires a size-2 ciphertext");
    if (shares.size() != topo_.size()) throw ProtocolAbort("missing share");
    const auto& ring = ctx_.ring();
    const int lvl = ct.level();
    std::vector<std::vector<RingPoly>> dec_shares(shares.size());
    for (size_t i = 0; i < shares.size(); ++i) {
      Prng pn = noise.fork("ddec", i);
      RingPoly s = ctx_.main_secret(shares[i].key, lvl);
      RingPoly d = ring.pointwise_mul(ct.polys[1], s);
      ring.add_inplace(d, smudge_poly(lvl, smudge_bits, pn));
      dec_shares[i] = {std::move(d)};
    }
    auto total = aggregate_up(dec_shares, Protocol::kDecShare, 1);
    Plaintext pt;
    pt.poly = ring.add(ct.polys[0], total[0]);
    pt.scale = ct.scale;
    return ctx_.decode(pt);
  }

  // ---- DKeySwitch ----

  Ciphertext dkeyswitch(const Ciphertext& ct, const PublicKey& pk_to,
                        const std::vector<SecretKeyShare>& shares,
                        int smudge_bits, Prng& noise) {
    if (ct.size() != 2) throw UsageError("dkeyswitch requires size-2 input");
    if (shares.size() != topo_.size()) throw ProtocolAbort("missing share");
    const auto& ring = ctx_.ring();
    const int lvl = ct.level();
    RingPoly p0 = ring.drop_level(pk_to.p0, lvl);
    RingPoly p1 = ring.drop_level(pk_to.p1, lvl);
    std::vector<std::vector<RingPoly>> ks_shares(shares.size());
    for (size_t i = 0; i < shares.size(); ++i) {
      Prng pn = noise.fork("cks", i);
      RingPoly s = ctx_.main_secret(shares[i].key, lvl);
      RingPoly u = ring.sample_ternary(lvl, pn);
      ring.to_ntt(u);
      RingPoly e1 = ring.sample_gaussian(ctx_.params().ring.eta, lvl, pn);
      ring.to_ntt(e1);
      RingPoly h0 = ring.pointwise_mul(ct.polys[1], s);
      ring.add_inplace(h0, ring.pointwise_mul(u, p0));
      ring.add_inplace(h0, smudge_poly(lvl, smudge_bits, pn));
      RingPoly h1 = ring.add(ring.pointwise_mul(u, p1), e1);
      ks_shares[i] = {std::move(h0), std::move(h1)};
    }
    auto total = aggregate_up(ks_shares, Protocol::kKeySwitchShare, 1);
    Ciphertext out;
    out.scale = ct.scale;
    out.polys.push_back(ring.add(ct.polys[0], total[0]));
    out.polys.push_back(std::move(total[1]));
    return out;
  }

  // ---- DBootstrap ----
  //
  // Round 1: every party uploads (masked decryption share at the current
  // level, re-encryption share at level L); shares combine up the tree.
  // Round 2: the root re-encodes the masked plaintext at level L, removes
  // the aggregate mask homomorphically, and broadcasts the refreshed
  // ciphertext down the tree. Share payloads are padded to the size of a
  // fresh ciphertext so the traffic accounting matches the per-round
  // ciphertext unit.
  Ciphertext dbootstrap(const Ciphertext& ct,
                        const std::vector<SecretKeyShare>& shares,
                        const MaskSpec& mask, Prng& noise) {
    if (ct.size() != 2) throw UsageError("dbootstrap requires size-2 input");
    if (ct.level() < ctx_.params().tau_b)
      throw MustBootstrapError(
          "ciphertext below tau_b: should have been bootstrapped earlier");
    validate_mask_bound(mask, shares.size());
    const auto& ring = ctx_.ring();
    const int lvl = ct.level();
    const int L = ctx_.top_level();
    Prng crs = crs_.fork("boot", boot_instances_++);
    RingPoly a = ring.sample_uniform(L, crs);

    const i128 bound = i128(1) << mask.bits();
    std::vector<BootShare> local(shares.size());
    for (size_t i = 0; i < shares.size(); ++i) {
      Prng pn = noise.fork("boot-noise", boot_instances_ * 1000 + i);
      auto m_coeffs = ring.sample_bounded_coeffs128(mask.bits(), pn);
      for (i128 c : m_coeffs)
        if (c >= bound || -c > bound)
          throw ParameterError("mask coefficient escaped its bound");
      RingPoly m_low = ring.from_signed_coeffs128(m_coeffs, lvl);
      ring.to_ntt(m_low);
      RingPoly m_high = ring.from_signed_coeffs128(m_coeffs, L);
      ring.to_ntt(m_high);
      RingPoly e0 = ring.sample_gaussian(ctx_.params().ring.eta, lvl, pn);
      ring.to_ntt(e0);
      RingPoly e1 = ring.sample_gaussian(ctx_.params().ring.eta, L, pn);
      ring.to_ntt(e1);
      RingPoly s_low = ctx_.main_secret(shares[i].key, lvl);
      RingPoly s_high = ctx_.main_secret(shares[i].key, L);
      BootShare bs;
      bs.h0 = ring.add(ring.sub(ring.pointwise_mul(ct.polys[1], s_low), m_low), e0);
      bs.h1 = ring.add(ring.sub(m_high, ring.pointwise_mul(a, s_high)), e1);
      local[i] = std::move(bs);
    }

    // Round 1: ascend the tree.
    const size_t wire_size = serialize(fresh_sized_ct(), ctx_.ring().n()).size();
    for (int p : topo_.up_order()) {
      for (int c : topo_.children(p)) {
        BootShare got = deserialize_boot_share(tr_->recv(c, p));
        ring.add_inplace(local[p].h0, got.h0);
        ring.add_inplace(local[p].h1, got.h1);
      }
      if (p != topo_.root)
        tr_->send(p, topo_.parent[p], Protocol::kBootShare, 1,
                  serialize_boot_share(local[p], wire_size));
    }
    const BootShare& total = local[topo_.root];

    // Root: recover the masked plaintext, lift to level L, unmask.
    RingPoly masked = ring.add(ct.polys[0], total.h0);
    ring.to_coeff(masked);
    std::vector<i128> lifted = ring.centered_coeffs(masked);
    RingPoly fresh0 = ring.from_signed_coeffs128(lifted, L);
    ring.to_ntt(fresh0);
    ring.add_inplace(fresh0, total.h1);
    Ciphertext out;
    out.scale = ct.scale;
    out.polys.push_back(std::move(fresh0));
    out.polys.push_back(a);

    // Round 2: broadcast the refreshed ciphertext down the tree.
    auto payload = serialize(out, ring.n());
    for (int p : topo_.down_order()) {
      if (p == topo_.root) continue;
      tr_->send(topo_.parent[p], p, Protocol::kBootResult, 2, payload);
    }
    ctx_.counters().bootstraps++;
    return out;
  }

 private:
  struct BootShare {
    RingPoly h0, h1;
  };

  // Aggregates k-poly shares up the tree; each non-root party sends its
  // combined share to its parent once (|S|-1 messages).
  std::vector<RingPoly> aggregate_up(
      std::vector<std::vector<RingPoly>>& local, Protocol proto, int round) {
    const auto& ring = ctx_.ring();
    for (int p : topo_.up_order()) {
      for (int c : topo_.children(p)) {
        auto got = deserialize_polys(tr_->recv(c, p));
        for (size_t k = 0; k < local[p].size(); ++k)
          ring.add_inplace(local[p][k], got[k]);
      }
      if (p != topo_.root)
        tr_->send(p, topo_.parent[p], proto, round,
                  serialize_polys(local[p]));
    }
    return std::move(local[topo_.root]);
  }

  // Broadcast raw bytes down the tree (|S|-1 messages).
  void broadcast_down(const std::vector<uint8_t>& payload, Protocol proto,
                      int round) {
    for (int p : topo_.down_order()) {
      if (p == topo_.root) continue;
      tr_->send(topo_.parent[p], p, proto, round, payload);
    }
  }

  RelinKey dkeygen_relin(const std::vector<SecretKeyShare>& shares,
                         Prng& noise) {
    const auto& ring = ctx_.ring();
    const int L = ctx_.top_level();
    const size_t n = shares.size();
    const double eta = ctx_.params().ring.eta;
    Prng crs = crs_.fork("rlk");
    std::vector<RingPoly> a(L + 1);
    for (int d = 0; d <= L; ++d) a[d] = ring.sample_uniform(L, crs, true);

    // Round 1: h0 = -u_i*a + P*w*s_i + e, h1 = s_i*a + e.
    std::vector<RingPoly> ephemeral(n);
    std::vector<std::vector<RingPoly>> r1(n);
    for (size_t i = 0; i < n; ++i) {
      Prng pn = noise.fork("rlk-r1", i);
      ephemeral[i] = ring.sample_ternary(L, pn, true);
      ring.to_ntt(ephemeral[i]);
      for (int d = 0; d <= L; ++d) {
        RingPoly e0 = ring.sample_gaussian(eta, L, pn, true);
        ring.to_ntt(e0);
        RingPoly h0 =
            ring.add(ring.negate(ring.pointwise_mul(ephemeral[i], a[d])), e0);
        add_digit_term(h0, shares[i].key.s_ntt, d);
        RingPoly e1 = ring.sample_gaussian(eta, L, pn, true);
        ring.to_ntt(e1);
        RingPoly h1 =
            ring.add(ring.pointwise_mul(shares[i].key.s_ntt, a[d]), e1);
        r1[i].push_back(std::move(h0));
        r1[i].push_back(std::move(h1));
      }
    }
    auto agg1 = aggregate_up(r1, Protocol::kKeygenRlk, 1);
    broadcast_down(serialize_polys(agg1), Protocol::kKeygenRlk, 1);

    // Round 2: h0' = s_i*h0 + e, h1' = (u_i - s_i)*h1 + e.
    std::vector<std::vector<RingPoly>> r2(n);
    for (size_t i = 0; i < n; ++i) {
      Prng pn = noise.fork("rlk-r2", i);
      for (int d = 0; d <= L; ++d) {
        RingPoly e0 = ring.sample_gaussian(eta, L, pn, true);
        ring.to_ntt(e0);
        RingPoly h0p =
            ring.add(ring.pointwise_mul(shares[i].key.s_ntt, agg1[2 * d]), e0);
        RingPoly e1 = ring.sample_gaussian(eta, L, pn, true);
        ring.to_ntt(e1);
        RingPoly diff = ring.sub(ephemeral[i], shares[i].key.s_ntt);
        RingPoly h1p =
            ring.add(ring.pointwise_mul(diff, agg1[2 * d + 1]), e1);
        r2[i].push_back(std::move(h0p));
        r2[i].push_back(std::move(h1p));
      }
    }
    auto agg2 = aggregate_up(r2, Protocol::kKeygenRlk, 2);

    RelinKey rlk;
    for (int d = 0; d <= L; ++d) {
      rlk.k0.push_back(ring.add(agg2[2 * d], agg2[2 * d + 1]));
      rlk.k1.push_back(agg1[2 * d + 1]);
    }
    return rlk;
  }

  KswKey dkeygen_rotation(const std::vector<SecretKeyShare>& shares, u64 g,
                          Prng& noise) {
    const auto& ring = ctx_.ring();
    const int L = ctx_.top_level();
    const size_t n = shares.size();
    Prng crs = crs_.fork("rtk", g);
    std::vector<RingPoly> a(L + 1);
    for (int d = 0; d <= L; ++d) a[d] = ring.sample_uniform(L, crs, true);
    std::vector<std::vector<RingPoly>> r1(n);
    for (size_t i = 0; i < n; ++i) {
      Prng pn = noise.fork("rtk-noise", g * 131 + i);
      RingPoly s_coeff =
          ring.from_signed_coeffs(shares[i].key.s_coeffs, L, true);
      RingPoly sg = ring.automorphism(s_coeff, g);
      ring.to_ntt(sg);
      for (int d = 0; d <= L; ++d) {
        RingPoly e = ring.sample_gaussian(ctx_.params().ring.eta, L, pn, true);
        ring.to_ntt(e);
        RingPoly h = ring.add(
            ring.negate(ring.pointwise_mul(shares[i].key.s_ntt, a[d])), e);
        add_digit_term(h, sg, d);
        r1[i].push_back(std::move(h));
      }
    }
    auto agg = aggregate_up(r1, Protocol::kKeygenRtk, 1);
    KswKey key;
    for (int d = 0; d <= L; ++d) {
      key.k0.push_back(std::move(agg[d]));
      key.k1.push_back(a[d]);
    }
    return key;
  }

  // Adds P * w_digit * t into residue `digit` of an extended NTT poly.
  void add_digit_term(RingPoly& h, const RingPoly& t_ntt_ext, int digit) const {
    const auto& ring = ctx_.ring();
    const u64 q = ctx_.params().ring.moduli[digit];
    const u64 pm = ring.p_mod_q(digit);
    u64* dst = h.residues[digit].data();
    const u64* src = t_ntt_ext.residues[digit].data();
    for (size_t t = 0; t < ring.n(); ++t)
      dst[t] = addmod(dst[t], mulmod(pm, src[t], q), q);
  }

  RingPoly smudge_poly(int level, int bits, Prng& prng) const {
    const auto& ring = ctx_.ring();
    if (bits <= 0) {
      RingPoly e = ring.sample_gaussian(ctx_.params().ring.eta, level, prng);
      ring.to_ntt(e);
      return e;
    }
    auto coeffs = ring.sample_bounded_coeffs128(bits, prng);
    RingPoly e = ring.from_signed_coeffs128(coeffs, level);
    ring.to_ntt(e);
    return e;
  }

  std::vector<uint8_t> serialize_polys(const std::vector<RingPoly>& ps) const {
    ByteWriter w;
    write_header(w, WireTag::kRingPoly, ctx_.ring().n(), 0, 1.0);
    w.u32(uint32_t(ps.size()));
    for (const auto& p : ps) write_poly_body(w, p);
    return w.take();
  }

  std::vector<RingPoly> deserialize_polys(const std::vector<uint8_t>& buf) const {
    ByteReader r(buf);
    (void)read_header(r);
    std::vector<RingPoly> ps(r.u32());
    for (auto& p : ps) p = read_poly_body(r);
    return ps;
  }

  std::vector<uint8_t> serialize_boot_share(const BootShare& bs,
                                            size_t pad_to) const {
    ByteWriter w;
    write_header(w, WireTag::kBootShare, ctx_.ring().n(), bs.h0.level, 1.0);
    write_poly_body(w, bs.h0);
    write_poly_body(w, bs.h1);
    auto buf = w.take();
    if (buf.size() < pad_to) buf.resize(pad_to, 0);
    return buf;
  }

  BootShare deserialize_boot_share(const std::vector<uint8_t>& buf) const {
    ByteReader r(buf);
    (void)read_header(r);
    BootShare out;
    out.h0 = read_poly_body(r);
    out.h1 = read_poly_body(r);
    return out;
  }

  // A zero ciphertext of fresh size, used only to fix the share wire width.
  Ciphertext fresh_sized_ct() const {
    Ciphertext ct;
    ct.scale = ctx_.delta();
    ct.polys.push_back(ctx_.ring().zero(ctx_.top_level(), true));
    ct.polys.push_back(ctx_.ring().zero(ctx_.top_level(), true));
    return ct;
  }

  const CkksContext& ctx_;
  Topology topo_;
  Transport* tr_;
  Prng crs_;
  u64 boot_instances_ = 0;
};

}  // namespace loom
