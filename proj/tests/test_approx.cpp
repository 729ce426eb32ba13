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

#include "loom/approx.hpp"

#include <cmath>

#include "gtest/gtest.h"
#include "testing/shadow.hpp"

namespace loom {
namespace {

using testing::Vec;
using testing::max_abs_diff;

// Deep chain so the multinomial activation path fits without bootstrapping.
struct ApproxEnv {
  CkksContext ctx;
  SecretKey sk;
  PublicKey pk;
  RelinKey rlk;
  ApproxEnv()
      : ctx([] {
          CryptoParams cp;
          cp.ring = make_ring_params(1 << 10, 24, 49, 30, 2, 49);
          cp.delta = double(1ULL << 30);
          return cp;
        }()) {
    Prng prng(0xAF);
    sk = ctx.gen_secret_key(prng);
    pk = ctx.gen_public_key(sk, prng);
    rlk = ctx.gen_relin_key(sk, prng);
  }

  Ciphertext enc(const Vec& v, Prng& rng, int level = -1) {
    if (level < 0) level = ctx.top_level();
    return ctx.encrypt(ctx.encode(v, ctx.delta(), level), pk, rng);
  }
};

ApproxEnv& env() {
  static ApproxEnv e;
  return e;
}

double grid_max_err(const ApproxSpec& spec,
                    const std::function<double(double)>& f) {
  double maxerr = 0;
  for (int i = 0; i < 10000; ++i) {
    const double x = spec.lo + (spec.hi - spec.lo) * double(i) / 9999.0;
    maxerr = std::max(maxerr, std::abs(spec.eval(x) - f(x)));
  }
  return maxerr;
}

TEST(Fit, IdentityIsAFixedPointOfBothFitters) {
  auto id = [](double x) { return x; };
  for (int d : {1, 2, 4, 9}) {
    ApproxSpec ls = fit_least_squares(id, ApproxTarget::kIdentity, -3, 5, d);
    EXPECT_NEAR(ls.coeffs[1], 1.0, 1e-10) << "ls d=" << d;
    for (size_t i = 0; i < ls.coeffs.size(); ++i)
      if (i != 1) EXPECT_NEAR(ls.coeffs[i], 0.0, 1e-10);
    ApproxSpec ch = fit_chebyshev(id, ApproxTarget::kIdentity, -3, 5, d);
    EXPECT_NEAR(ch.coeffs[1], 1.0, 1e-10) << "cheb d=" << d;
    for (size_t i = 0; i < ch.coeffs.size(); ++i)
      if (i != 1) EXPECT_NEAR(ch.coeffs[i], 0.0, 1e-10);
  }
}

TEST(Fit, SigmoidDegreeThreeHitsHalfAtZero) {
  ApproxSpec s = fit_least_squares(sigmoid, ApproxTarget::kSigmoid, -8, 8, 3);
  EXPECT_NEAR(s.eval(0.0), 0.5, 1e-6);  // symmetry pins the midpoint
}

TEST(Fit, SigmoidGridErrorsFrozenAndMonotone) {
  // Measured once on the 10^4-point grid and frozen as regression bounds.
  const double frozen[3] = {0.1145, 0.0615, 0.0322};
  double errs[3];
  int idx = 0;
  for (int d : {3, 5, 7}) {
    ApproxSpec s = fit_least_squares(sigmoid, ApproxTarget::kSigmoid, -8, 8, d);
    errs[idx] = grid_max_err(s, sigmoid);
    EXPECT_LT(errs[idx], frozen[idx]) << "d=" << d;
    ++idx;
  }
  EXPECT_GE(errs[0], errs[1]);
  EXPECT_GE(errs[1], errs[2]);
}

TEST(Fit, OddSymmetryZeroesEvenCoefficients) {
  ApproxSpec s = fit_least_squares(sigmoid, ApproxTarget::kSigmoid, -8, 8, 5,
                                   /*odd_symmetry=*/true);
  EXPECT_NEAR(s.coeffs[0], 0.5, 1e-9);
  EXPECT_NEAR(s.coeffs[2], 0.0, 1e-12);
  EXPECT_NEAR(s.coeffs[4], 0.0, 1e-12);
}

TEST(Fit, IllConditionedFitRaisesParameterError) {
  // 1/x across the pole has no finite polynomial fit.
  EXPECT_THROW(fit_chebyshev([](double x) { return 1.0 / x; },
                             ApproxTarget::kReciprocal, -1.0, 1.0, 9),
               ParameterError);
}

TEST(AfEval, IdentityPolynomialReturnsInput) {
  auto& e = env();
  Prng rng(1);
  Vec v(e.ctx.slots());
  for (double& x : v) x = rng.uniform(-1, 1);
  Ciphertext u = e.enc(v, rng);
  ApproxSpec id;
  id.degree = 1;
  id.coeffs = {0.0, 1.0};
  Ciphertext out = AfEvaluator(e.ctx, e.rlk).eval(u, id);
  EXPECT_EQ(u.level() - out.level(), 1);  // degree-1 floor
  Vec got = e.ctx.decrypt_values(out, e.sk);
  EXPECT_LT(max_abs_diff(got, v), 1e-3);
}

TEST(AfEval, RandomDegreeFiveMatchesHornerOracle) {
  auto& e = env();
  Prng rng(2);
  Vec v(e.ctx.slots());
  for (double& x : v) x = rng.uniform(-1, 1);
  ApproxSpec spec;
  spec.degree = 5;
  for (int i = 0; i <= 5; ++i) spec.coeffs.push_back(rng.uniform(-1, 1));
  Ciphertext u = e.enc(v, rng);
  Ciphertext out = AfEvaluator(e.ctx, e.rlk).eval(u, spec);
  Vec got = e.ctx.decrypt_values(out, e.sk);
  EXPECT_LT(max_abs_diff(got, testing::horner_vec(spec.coeffs, v)), 1e-3);
}

TEST(AfEval, DepthAndValueAcrossRequiredDegrees) {
  auto& e = env();
  Prng rng(3);
  const int expected_depth[] = {2, 3, 3, 5, 6};
  const int degrees[] = {3, 5, 7, 15, 19};
  for (int t = 0; t < 5; ++t) {
    const int d = degrees[t];
    Vec v(e.ctx.slots());
    for (double& x : v) x = rng.uniform(-1, 1);
    ApproxSpec spec;
    spec.degree = d;
    for (int i = 0; i <= d; ++i)
      spec.coeffs.push_back(rng.uniform(-1, 1) / std::pow(1.5, i));
    Ciphertext u = e.enc(v, rng);
    Ciphertext out = AfEvaluator(e.ctx, e.rlk).eval(u, spec);
    EXPECT_EQ(u.level() - out.level(), expected_depth[t]) << "d=" << d;
    EXPECT_DOUBLE_EQ(out.scale, e.ctx.delta());
    Vec got = e.ctx.decrypt_values(out, e.sk);
    EXPECT_LT(max_abs_diff(got, testing::horner_vec(spec.coeffs, v)), 1e-3)
        << "d=" << d;
  }
}

TEST(AfEval, InsufficientLevelsRaiseMustBootstrap) {
  auto& e = env();
  Prng rng(4);
  Vec v(4, 0.5);
  Ciphertext u = e.enc(v, rng, /*level=*/3);
  ApproxSpec spec;
  spec.degree = 19;
  spec.coeffs.assign(20, 0.01);
  EXPECT_THROW(AfEvaluator(e.ctx, e.rlk).eval(u, spec), MustBootstrapError);
}

TEST(Activation, LinearIsIdentity) {
  auto& e = env();
  Prng rng(5);
  Vec v{0.3, -0.7, 1.1};
  Ciphertext u = e.enc(v, rng);
  ActivationSpecs specs = default_activation_specs(3, 5, 3);
  Ciphertext out = activation(e.ctx, u, GlmKind::kLinear, specs, e.rlk);
  EXPECT_EQ(out.level(), u.level());
  Vec got = e.ctx.decrypt_values(out, e.sk);
  EXPECT_NEAR(got[0], 0.3, 1e-3);
}

TEST(Activation, LogisticAtZeroIsHalf) {
  auto& e = env();
  Prng rng(6);
  Vec v(e.ctx.slots(), 0.0);
  Ciphertext u = e.enc(v, rng);
  ActivationSpecs specs = default_activation_specs(3, 5, 3);
  Ciphertext out = activation(e.ctx, u, GlmKind::kLogistic, specs, e.rlk);
  Vec got = e.ctx.decrypt_values(out, e.sk);
  EXPECT_NEAR(got[0], 0.5, 0.01);
  EXPECT_EQ(u.level() - out.level(), specs.sigmoid_spec.depth());
}

TEST(Activation, LogisticMatchesPolynomialShadow) {
  auto& e = env();
  Prng rng(7);
  Vec v(e.ctx.slots());
  for (double& x : v) x = rng.uniform(-6, 6);
  Ciphertext u = e.enc(v, rng);
  ActivationSpecs specs = default_activation_specs(5, 5, 3);
  Ciphertext out = activation(e.ctx, u, GlmKind::kLogistic, specs, e.rlk);
  Vec got = e.ctx.decrypt_values(out, e.sk);
  // Against the cleartext polynomial with the same coefficients; the
  // polynomial-vs-sigmoid gap is covered by the fit tests above.
  EXPECT_LT(max_abs_diff(got, testing::horner_vec(specs.sigmoid_spec.coeffs, v)),
            1e-3);
}

// Cleartext emulation of the same smooth-max arithmetic (same polynomials).
std::vector<Vec> apmax_emulate_rows(const std::vector<Vec>& rows,
                                    const ActivationSpecs& s) {
  const size_t w = rows[0].size();
  Vec usum(w, 0.0);
  for (const auto& r : rows)
    for (size_t i = 0; i < w; ++i) usum[i] += r[i];
  std::vector<Vec> weights;
  for (const auto& r : rows) {
    Vec x(w);
    for (size_t i = 0; i < w; ++i) x[i] = r[i] - usum[i];
    weights.push_back(testing::horner_vec(s.ap_exp.coeffs, x));
  }
  Vec wsum(w, 0.0);
  for (const auto& wt : weights)
    for (size_t i = 0; i < w; ++i) wsum[i] += wt[i];
  Vec inv = testing::horner_vec(s.recip.coeffs, wsum);
  Vec m(w, 0.0);
  for (size_t l = 0; l < rows.size(); ++l)
    for (size_t i = 0; i < w; ++i) m[i] += rows[l][i] * weights[l][i];
  for (size_t i = 0; i < w; ++i) m[i] *= inv[i];
  return {m};
}

TEST(ApMax, EqualRowsReturnThatRow) {
  auto& e = env();
  Prng rng(8);
  Vec v(e.ctx.slots());
  for (double& x : v) x = rng.uniform(-1, 1);
  ActivationSpecs specs = default_activation_specs(3, 15, 3);
  std::vector<Ciphertext> rows{e.enc(v, rng), e.enc(v, rng), e.enc(v, rng)};
  Ciphertext m = ap_max(e.ctx, rows, specs, e.rlk);
  Vec got = e.ctx.decrypt_values(m, e.sk);
  EXPECT_LT(max_abs_diff(got, v), 0.02);
}

TEST(ApMax, DominantRowWins) {
  auto& e = env();
  Prng rng(9);
  ActivationSpecs specs = default_activation_specs(3, 19, 3);
  // Sharper weighting for the dominance check: h = 1, reciprocal fitted
  // around the attained weight-sum magnitude.
  specs.h = 1.0;
  specs.ap_exp = fit_chebyshev(
      [&](double x) { return std::exp(x / specs.h) / specs.h_prime; },
      ApproxTarget::kExpScaled, -8.0, 8.0, 19);
  specs.recip = fit_chebyshev([](double x) { return 1.0 / x; },
                              ApproxTarget::kReciprocal, 100.0, 160.0, 9);
  Vec hi(e.ctx.slots(), 3.0), lo(e.ctx.slots(), -3.0);
  std::vector<Ciphertext> rows{e.enc(hi, rng), e.enc(lo, rng), e.enc(lo, rng)};
  Ciphertext m = ap_max(e.ctx, rows, specs, e.rlk);
  Vec got = e.ctx.decrypt_values(m, e.sk);
  auto emu = apmax_emulate_rows({hi, lo, lo}, specs);
  EXPECT_LT(max_abs_diff(got, emu[0]), 1e-3);  // protocol-arithmetic oracle
  EXPECT_NEAR(got[0], 3.0, 0.05);              // and it tracks the max
}

TEST(ApMax, RandomRowsMatchProtocolShadow) {
  auto& e = env();
  Prng rng(10);
  ActivationSpecs specs = default_activation_specs(3, 15, 3);
  std::vector<Vec> rows_clear(3, Vec(e.ctx.slots(), 0.0));
  std::vector<Ciphertext> rows;
  for (auto& r : rows_clear) {
    for (size_t i = 0; i < 8; ++i) r[i] = rng.uniform(-1.5, 1.5);
    rows.push_back(e.enc(r, rng));
  }
  Ciphertext m = ap_max(e.ctx, rows, specs, e.rlk);
  Vec got = e.ctx.decrypt_values(m, e.sk);
  auto emu = apmax_emulate_rows(rows_clear, specs);
  Vec got8(got.begin(), got.begin() + 8);
  Vec emu8(emu[0].begin(), emu[0].begin() + 8);
  EXPECT_LT(max_abs_diff(got8, emu8), 1e-3);
}

TEST(Activation, MultinomialMatchesSoftmaxOracle) {
  auto& e = env();
  Prng rng(11);
  ActivationSpecs specs = default_activation_specs(3, 15, 3);
  const size_t cols = 8;
  std::vector<Vec> logits(3, Vec(e.ctx.slots(), 0.0));
  for (auto& r : logits)
    for (size_t i = 0; i < cols; ++i) r[i] = rng.uniform(-2, 2);
  std::vector<Ciphertext> rows;
  for (const auto& r : logits) rows.push_back(e.enc(r, rng));
  auto out = activation_multinomial(e.ctx, rows, specs, e.rlk);
  ASSERT_EQ(out.size(), 3u);
  for (size_t l = 0; l < 3; ++l) {
    Vec got = e.ctx.decrypt_values(out[l], e.sk);
    for (size_t i = 0; i < cols; ++i) {
      double denom = 0;
      for (size_t j = 0; j < 3; ++j) denom += std::exp(logits[j][i]);
      const double want = std::exp(logits[l][i]) / denom;
      EXPECT_NEAR(got[i], want, 1e-2) << "class " << l << " col " << i;
    }
  }
}

}  // namespace
}  // namespace loom
