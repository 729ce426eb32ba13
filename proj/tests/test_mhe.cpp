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

#include "loom/mhe.hpp"

#include <cmath>

#include "gtest/gtest.h"
#include "testing/shadow.hpp"

namespace loom {
namespace {

using testing::Vec;
using testing::max_abs_diff;
using testing::rel_err;

CryptoParams desk_params() {
  CryptoParams cp;
  cp.ring = make_ring_params(1 << 10, 7, 49, 30, 2, 49);
  cp.delta = double(1ULL << 30);
  return cp;
}

CryptoParams precise_params() {
  CryptoParams cp;
  cp.ring = make_ring_params(1 << 10, 4, 50, 46, 2, 49);
  cp.delta = std::ldexp(1.0, 45);
  return cp;
}

// Test-harness oracle: a single secret equal to the sum of all shares.
SecretKey summed_secret(const CkksContext& ctx,
                        const std::vector<SecretKeyShare>& shares) {
  SecretKey sum;
  sum.s_coeffs.assign(ctx.ring().n(), 0);
  for (const auto& sh : shares)
    for (size_t t = 0; t < sum.s_coeffs.size(); ++t)
      sum.s_coeffs[t] += sh.key.s_coeffs[t];
  sum.s_ntt = ctx.ring().from_signed_coeffs(sum.s_coeffs, ctx.top_level(), true);
  ctx.ring().to_ntt(sum.s_ntt);
  return sum;
}

struct Session {
  CkksContext ctx;
  Transport transport;
  MheSession mhe;
  std::vector<SecretKeyShare> shares;
  CollectiveKeys keys;
  Prng noise;

  Session(CryptoParams cp, size_t n_parties, u64 seed = 0xD15C0)
      : ctx(std::move(cp)),
        transport(n_parties),
        mhe(ctx, Topology::star(n_parties), &transport, seed),
        noise(seed ^ 0x9E) {
    Prng share_rng(seed ^ 0x5EED);
    shares = MheSession::gen_shares(ctx, n_parties, share_rng);
    keys = mhe.dkeygen(shares, noise);
  }

  Ciphertext enc(const Vec& v, Prng& rng) {
    return ctx.encrypt(ctx.encode(v, ctx.delta(), ctx.top_level()), keys.pk,
                       rng);
  }
};

Vec random_values(Prng& rng, size_t count, double bound) {
  Vec v(count);
  for (double& x : v) x = rng.uniform(-bound, bound);
  return v;
}

TEST(Dkeygen, SinglePartyDegeneratesToLocalKeygen) {
  Session s(desk_params(), 1);
  Prng rng(1);
  Vec v = random_values(rng, s.ctx.slots(), 4.0);
  Ciphertext ct = s.enc(v, rng);
  // With one share the collective secret is that share.
  Vec got = s.ctx.decrypt_values(ct, s.shares[0].key);
  EXPECT_LT(rel_err(got, v), 1e-3);
}

TEST(Dkeygen, ThreePartyEncryptThenDdecRecovers) {
  Session s(desk_params(), 3);
  Prng rng(2);
  Vec v = random_values(rng, s.ctx.slots(), 4.0);
  Ciphertext ct = s.enc(v, rng);
  Vec got = s.mhe.ddec(ct, s.shares, /*smudge_bits=*/12, s.noise);
  EXPECT_LT(rel_err(got, v), 1e-3);
}

TEST(Dkeygen, CollectiveRelinKeySupportsMultiplication) {
  Session s(desk_params(), 3);
  Prng rng(3);
  Vec u = random_values(rng, s.ctx.slots(), 2.0);
  Vec w = random_values(rng, s.ctx.slots(), 2.0);
  Ciphertext a = s.enc(u, rng);
  Ciphertext b = s.enc(w, rng);
  Ciphertext prod = s.ctx.rescale(s.ctx.mult_relin(a, b, s.keys.rlk));
  Vec got = s.mhe.ddec(prod, s.shares, 12, s.noise);
  EXPECT_LT(rel_err(got, testing::shadow_mul(u, w)), 1e-3);
}

TEST(Dkeygen, CollectiveRotationKeysRotate) {
  Session s(desk_params(), 3);
  Prng rng(4);
  Vec v = random_values(rng, s.ctx.slots(), 2.0);
  Ciphertext ct = s.enc(v, rng);
  Ciphertext rot = s.ctx.rotate_left(ct, 5, s.keys.rks);
  Vec got = s.mhe.ddec(rot, s.shares, 12, s.noise);
  EXPECT_LT(rel_err(got, testing::shadow_rot_left(v, 5)), 1e-3);
}

TEST(Ddec, EncryptedZeroDecodesToZero) {
  Session s(desk_params(), 3);
  Prng rng(5);
  Ciphertext z = s.ctx.encrypt_zero(s.ctx.delta(), s.ctx.top_level(),
                                    s.keys.pk, rng);
  Vec got = s.mhe.ddec(z, s.shares, 12, s.noise);
  EXPECT_LT(testing::max_abs(got), 1e-3);
}

TEST(Ddec, MatchesSummedSecretOracle) {
  Session s(desk_params(), 3);
  Prng rng(6);
  Vec v = random_values(rng, s.ctx.slots(), 4.0);
  Ciphertext ct = s.enc(v, rng);
  SecretKey sum = summed_secret(s.ctx, s.shares);
  Vec direct = s.ctx.decrypt_values(ct, sum);
  Vec distributed = s.mhe.ddec(ct, s.shares, 12, s.noise);
  EXPECT_LT(max_abs_diff(direct, distributed), 1e-3);
}

TEST(Ddec, PrecisionFrozenAtHighPrecisionChain) {
  Session s(precise_params(), 3, 0xAB);
  Prng rng(7);
  Vec v = random_values(rng, s.ctx.slots(), 4.0);
  Ciphertext ct = s.enc(v, rng);
  Vec got = s.mhe.ddec(ct, s.shares, /*smudge_bits=*/20, s.noise);
  EXPECT_LT(max_abs_diff(got, v), std::ldexp(1.0, -18));
}

TEST(Ddec, MissingShareAborts) {
  Session s(desk_params(), 3);
  Prng rng(8);
  Ciphertext ct = s.enc(random_values(rng, 8, 1.0), rng);
  std::vector<SecretKeyShare> partial(s.shares.begin(), s.shares.end() - 1);
  EXPECT_THROW(s.mhe.ddec(ct, partial, 12, s.noise), ProtocolAbort);
}

TEST(Dkeyswitch, IdentityTargetPreservesValues) {
  Session s(desk_params(), 3);
  Prng rng(9);
  Vec v = random_values(rng, s.ctx.slots(), 4.0);
  Ciphertext ct = s.enc(v, rng);
  Ciphertext sw = s.mhe.dkeyswitch(ct, s.keys.pk, s.shares, 12, s.noise);
  Vec got = s.mhe.ddec(sw, s.shares, 12, s.noise);
  EXPECT_LT(rel_err(got, v), 1e-3);
}

TEST(Dkeyswitch, QuerierKeypairRoundTrip) {
  Session s(precise_params(), 3, 0xAC);
  Prng rng(10);
  Prng qrng(999);
  SecretKey qsk = s.ctx.gen_secret_key(qrng);
  PublicKey qpk = s.ctx.gen_public_key(qsk, qrng);
  Vec v = random_values(rng, s.ctx.slots(), 4.0);
  Ciphertext ct = s.enc(v, rng);
  Ciphertext sw = s.mhe.dkeyswitch(ct, qpk, s.shares, 20, s.noise);
  Vec got = s.ctx.decrypt_values(sw, qsk);
  EXPECT_LT(max_abs_diff(got, v), std::ldexp(1.0, -18));
}

TEST(Dkeyswitch, IntermediateTranscriptUncorrelatedUnderTargetKey) {
  Session s(desk_params(), 3);
  Prng rng(11);
  Prng qrng(998);
  SecretKey qsk = s.ctx.gen_secret_key(qrng);
  PublicKey qpk = s.ctx.gen_public_key(qsk, qrng);
  Vec v = random_values(rng, s.ctx.slots(), 4.0);
  Ciphertext ct = s.enc(v, rng);
  // A single party's contribution: the switch is incomplete, so the partial
  // result must not decrypt under the querier key.
  const auto& ring = s.ctx.ring();
  Prng pn(12345);
  RingPoly sk0 = s.ctx.main_secret(s.shares[0].key, ct.level());
  RingPoly u = ring.sample_ternary(ct.level(), pn);
  ring.to_ntt(u);
  Ciphertext partial;
  partial.scale = ct.scale;
  partial.polys.push_back(
      ring.add(ct.polys[0], ring.add(ring.pointwise_mul(ct.polys[1], sk0),
                                     ring.pointwise_mul(u, ring.drop_level(qpk.p0, ct.level())))));
  partial.polys.push_back(ring.pointwise_mul(u, ring.drop_level(qpk.p1, ct.level())));
  Vec got = s.ctx.decrypt_values(partial, qsk);
  double num = 0, dg = 0, dv = 0;
  for (size_t i = 0; i < v.size(); ++i) {
    num += got[i] * v[i];
    dg += got[i] * got[i];
    dv += v[i] * v[i];
  }
  EXPECT_LT(std::abs(num / std::sqrt(dg * dv + 1e-30)), 0.2);
}

TEST(Dbootstrap, EncryptedZeroRefreshesToTopLevel) {
  Session s(desk_params(), 3);
  Prng rng(12);
  Ciphertext z = s.ctx.encrypt_zero(s.ctx.delta(), s.ctx.top_level(),
                                    s.keys.pk, rng);
  z = s.ctx.drop_to_level(z, 1);
  MaskSpec mask{30, delta_bound_for(s.ctx.delta(), 8.0)};
  Ciphertext fresh = s.mhe.dbootstrap(z, s.shares, mask, s.noise);
  EXPECT_EQ(fresh.level(), s.ctx.top_level());
  Vec got = s.mhe.ddec(fresh, s.shares, 12, s.noise);
  EXPECT_LT(testing::max_abs(got), 1e-2);
}

TEST(Dbootstrap, RandomValuesAtLevelOneRestoredWithinDrift) {
  Session s(desk_params(), 3);
  Prng rng(13);
  Vec v = random_values(rng, s.ctx.slots(), 4.0);
  Ciphertext ct = s.ctx.drop_to_level(s.enc(v, rng), 1);
  MaskSpec mask{30, delta_bound_for(s.ctx.delta(), 8.0)};
  Ciphertext fresh = s.mhe.dbootstrap(ct, s.shares, mask, s.noise);
  EXPECT_EQ(fresh.level(), s.ctx.top_level());
  Vec got = s.mhe.ddec(fresh, s.shares, 12, s.noise);
  EXPECT_LT(max_abs_diff(got, v), 1e-2);
}

TEST(Dbootstrap, TrafficMatchesTwoRoundsOfCiphertexts) {
  Session s(desk_params(), 5);
  Prng rng(14);
  Vec v = random_values(rng, s.ctx.slots(), 2.0);
  Ciphertext ct = s.ctx.drop_to_level(s.enc(v, rng), 2);
  s.transport.reset_counters();
  MaskSpec mask{30, delta_bound_for(s.ctx.delta(), 8.0)};
  Ciphertext fresh = s.mhe.dbootstrap(ct, s.shares, mask, s.noise);
  const auto up = s.transport.traffic_for(Protocol::kBootShare);
  const auto down = s.transport.traffic_for(Protocol::kBootResult);
  EXPECT_EQ(up.messages, 4u);
  EXPECT_EQ(down.messages, 4u);
  const size_t ct_bytes = serialize(fresh, s.ctx.ring().n()).size();
  EXPECT_EQ(up.bytes, 4 * ct_bytes);
  EXPECT_EQ(down.bytes, 4 * ct_bytes);
}

TEST(Dbootstrap, BelowTauBRaisesMustBootstrapEarlier) {
  Session s(desk_params(), 3);
  Prng rng(15);
  Ciphertext ct = s.ctx.drop_to_level(s.enc(random_values(rng, 4, 1.0), rng), 0);
  MaskSpec mask{30, delta_bound_for(s.ctx.delta(), 8.0)};
  EXPECT_THROW(s.mhe.dbootstrap(ct, s.shares, mask, s.noise),
               MustBootstrapError);
}

TEST(Dbootstrap, MaskBoundViolationIsParameterError) {
  Session s(desk_params(), 3);
  Prng rng(16);
  Ciphertext ct = s.ctx.drop_to_level(s.enc(random_values(rng, 4, 1.0), rng), 1);
  MaskSpec mask{60, 39};  // lambda + delta too wide for q0*q1
  EXPECT_THROW(s.mhe.dbootstrap(ct, s.shares, mask, s.noise), ParameterError);
}

TEST(Dbootstrap, SinglePartyNoMessages) {
  Session s(desk_params(), 1);
  Prng rng(17);
  Vec v = random_values(rng, s.ctx.slots(), 2.0);
  Ciphertext ct = s.ctx.drop_to_level(s.enc(v, rng), 1);
  s.transport.reset_counters();
  MaskSpec mask{30, delta_bound_for(s.ctx.delta(), 8.0)};
  Ciphertext fresh = s.mhe.dbootstrap(ct, s.shares, mask, s.noise);
  EXPECT_TRUE(s.transport.transcript().empty());
  Vec got = s.ctx.decrypt_values(fresh, s.shares[0].key);
  EXPECT_LT(max_abs_diff(got, v), 1e-2);
}

TEST(Protocols, CompositionEqualsSummedSecretOracle) {
  // dkeyswitch to a fresh key equals a decrypt-under-sum + re-encrypt path
  // within tolerance, for several party counts.
  for (size_t n : {1u, 3u, 5u}) {
    Session s(desk_params(), n, 0xE0 + n);
    Prng rng(100 + n);
    Vec v = random_values(rng, s.ctx.slots(), 4.0);
    Ciphertext ct = s.enc(v, rng);
    SecretKey sum = summed_secret(s.ctx, s.shares);
    Vec direct = s.ctx.decrypt_values(ct, sum);
    Vec via_ddec = s.mhe.ddec(ct, s.shares, 12, s.noise);
    EXPECT_LT(max_abs_diff(direct, via_ddec), 1e-3) << n << " parties";
  }
}

}  // namespace
}  // namespace loom
