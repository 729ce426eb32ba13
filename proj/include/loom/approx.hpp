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
// Polynomial activation machinery: least-squares and Chebyshev fits, the
// baby-step/giant-step encrypted evaluator, the GLM activation dispatch and
// the exponential-weighting max approximation.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "loom/ckks.hpp"

namespace loom {

enum class ApproxTarget : uint8_t {
  kSigmoid = 0,
  kExpScaled = 1,
  kReciprocal = 2,
  kIdentity = 3,
};

enum class FitKind : uint8_t { kLeastSquares = 0, kChebyshev = 1 };

struct ApproxSpec {
  ApproxTarget target = ApproxTarget::kIdentity;
  FitKind kind = FitKind::kLeastSquares;
  double lo = -1.0, hi = 1.0;
  int degree = 1;
  std::vector<double> coeffs;  // monomial basis, length degree+1

  // Levels the encrypted evaluator consumes for this degree.
  int depth() const { return af_depth(degree); }

  static int af_depth(int d) {
    if (d < 1) throw UsageError("degree must be >= 1");
    const int base = ceil_log2(u64(d));
    return std::max(1, base + (d > 7 ? 1 : 0));
  }

  double eval(double x) const {
    double acc = 0;
    for (size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
    return acc;
  }
};

// ---- Fitting ----

namespace detail {

// Composes p(t), t = s*x + o, into monomials in x.
inline std::vector<double> affine_compose(const std::vector<double>& pt,
                                          double s, double o) {
  std::vector<double> res{pt.empty() ? 0.0 : pt.back()};
  for (size_t k = pt.size() - 1; k-- > 0;) {
    std::vector<double> next(res.size() + 1, 0.0);
    for (size_t i = 0; i < res.size(); ++i) {
      next[i + 1] += res[i] * s;
      next[i] += res[i] * o;
    }
    next[0] += pt[k];
    res = std::move(next);
  }
  return res;
}

inline void check_fit_quality(const std::vector<double>& coeffs, double lo,
                              double hi, double coeff_limit) {
  const double xmax = std::max({1.0, std::abs(lo), std::abs(hi)});
  double pw = 1.0;
  for (double c : coeffs) {
    if (!std::isfinite(c) || std::abs(c) * pw > coeff_limit)
      throw ParameterError("ill-conditioned fit: coefficient blow-up");
    pw *= xmax;
  }
}

}  // namespace detail

// Least squares on a dense uniform grid over [lo, hi], solved in the
// normalized variable for conditioning. `odd_symmetry` restricts the fit to
// r0 + odd powers (useful for sigmoid-like targets).
inline ApproxSpec fit_least_squares(const std::function<double(double)>& f,
                                    ApproxTarget target, double lo, double hi,
                                    int d, bool odd_symmetry = false,
                                    double coeff_limit = 1e9) {
  if (d < 1 || d > 31) throw UsageError("degree out of range");
  if (!(lo < hi)) throw UsageError("empty fit interval");
  const int grid = 4096;
  std::vector<int> exps;
  if (odd_symmetry) {
    exps.push_back(0);
    for (int e = 1; e <= d; e += 2) exps.push_back(e);
  } else {
    for (int e = 0; e <= d; ++e) exps.push_back(e);
  }
  Eigen::MatrixXd a(grid, int(exps.size()));
  Eigen::VectorXd y(grid);
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  for (int i = 0; i < grid; ++i) {
    const double t = -1.0 + 2.0 * double(i) / double(grid - 1);
    const double x = mid + half * t;
    y(i) = f(x);
    for (size_t j = 0; j < exps.size(); ++j) a(i, int(j)) = std::pow(t, exps[j]);
  }
  Eigen::VectorXd sol = a.colPivHouseholderQr().solve(y);
  std::vector<double> in_t(size_t(d) + 1, 0.0);
  for (size_t j = 0; j < exps.size(); ++j) in_t[exps[j]] = sol(int(j));
  ApproxSpec spec;
  spec.target = target;
  spec.kind = FitKind::kLeastSquares;
  spec.lo = lo;
  spec.hi = hi;
  spec.degree = d;
  spec.coeffs = detail::affine_compose(in_t, 1.0 / half, -mid / half);
  spec.coeffs.resize(size_t(d) + 1, 0.0);
  detail::check_fit_quality(spec.coeffs, lo, hi, coeff_limit);
  return spec;
}

// Chebyshev series truncated at degree d, converted to the monomial basis.
inline ApproxSpec fit_chebyshev(const std::function<double(double)>& f,
                                ApproxTarget target, double lo, double hi,
                                int d, double coeff_limit = 1e9) {
  if (d < 1 || d > 31) throw UsageError("degree out of range");
  if (!(lo < hi)) throw UsageError("empty fit interval");
  const int m = std::max(64, 4 * (d + 1));
  const double pi = 3.14159265358979323846264338328;
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  std::vector<double> fx(m);
  for (int j = 0; j < m; ++j) {
    const double theta = pi * (double(j) + 0.5) / double(m);
    fx[j] = f(mid + half * std::cos(theta));
  }
  std::vector<double> cheb(size_t(d) + 1, 0.0);
  for (int k = 0; k <= d; ++k) {
    double s = 0;
    for (int j = 0; j < m; ++j)
      s += fx[j] * std::cos(pi * k * (double(j) + 0.5) / double(m));
    cheb[k] = 2.0 * s / double(m);
  }
  cheb[0] *= 0.5;
  // T_k recurrence in the normalized variable.
  std::vector<double> in_t(size_t(d) + 1, 0.0);
  std::vector<double> tkm1{1.0}, tk{0.0, 1.0};
  in_t[0] += cheb[0];
  if (d >= 1)
    for (size_t i = 0; i < tk.size(); ++i) in_t[i] += cheb[1] * tk[i];
  for (int k = 2; k <= d; ++k) {
    std::vector<double> tk1(size_t(k) + 1, 0.0);
    for (size_t i = 0; i < tk.size(); ++i) tk1[i + 1] += 2.0 * tk[i];
    for (size_t i = 0; i < tkm1.size(); ++i) tk1[i] -= tkm1[i];
    for (size_t i = 0; i < tk1.size(); ++i) in_t[i] += cheb[k] * tk1[i];
    tkm1 = std::move(tk);
    tk = std::move(tk1);
  }
  ApproxSpec spec;
  spec.target = target;
  spec.kind = FitKind::kChebyshev;
  spec.lo = lo;
  spec.hi = hi;
  spec.degree = d;
  spec.coeffs = detail::affine_compose(in_t, 1.0 / half, -mid / half);
  spec.coeffs.resize(size_t(d) + 1, 0.0);
  detail::check_fit_quality(spec.coeffs, lo, hi, coeff_limit);
  return spec;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// ---- Encrypted polynomial evaluation (baby-step giant-step) ----

class AfEvaluator {
 public:
  AfEvaluator(const CkksContext& ctx, const RelinKey& rlk)
      : ctx_(ctx), rlk_(rlk) {}

  // Evaluates sum_i r_i u^i slotwise. Consumes exactly
  // ApproxSpec::af_depth(d) levels and lands on the default scale.
  Ciphertext eval(const Ciphertext& u, const ApproxSpec& spec) const {
    const int d = true_degree(spec.coeffs);
    if (d < 1) throw UsageError("af_eval needs degree >= 1");
    const int budget = ApproxSpec::af_depth(spec.degree);
    if (u.level() < budget)
      throw MustBootstrapError("insufficient levels for activation");
    // Smallest omega with 2^omega > d; k = floor(omega/2).
    int omega = 1;
    while ((1 << omega) <= d) ++omega;
    const int k = omega / 2;

    PowerBasis basis = build_powers(u, d, omega, k);
    Node root = eval_node(std::span<const double>(spec.coeffs.data(), size_t(d) + 1),
                          basis, k, ctx_.delta());
    if (!root.ct.has_value())
      throw UsageError("af_eval degenerated to a constant");
    Ciphertext out = *root.ct;
    const int target_level = u.level() - budget;
    if (out.level() < target_level)
      throw PrecisionError("activation consumed more than its budget");
    out = ctx_.drop_to_level(out, target_level);
    return out;
  }

 private:
  struct PowerBasis {
    std::map<int, Ciphertext> p;  // exponent -> ciphertext power
  };

  struct Node {
    std::optional<Ciphertext> ct;
    double constant = 0.0;  // used when ct is empty
  };

  static int true_degree(const std::vector<double>& c) {
    int d = int(c.size()) - 1;
    while (d > 0 && c[size_t(d)] == 0.0) --d;
    return d;
  }

  Ciphertext power_product(const Ciphertext& a, const Ciphertext& b) const {
    const int lvl = std::min(a.level(), b.level());
    Ciphertext prod = ctx_.mult_relin(ctx_.drop_to_level(a, lvl),
                                      ctx_.drop_to_level(b, lvl), rlk_);
    return ctx_.rescale(prod);
  }

  PowerBasis build_powers(const Ciphertext& u, int d, int omega, int k) const {
    PowerBasis basis;
    basis.p.emplace(1, u);
    const int baby_top = std::min(d, 1 << k);
    for (int j = 2; j <= baby_top; ++j) {
      const Ciphertext& lo = basis.p.at(j / 2);
      const Ciphertext& hi = basis.p.at(j - j / 2);
      basis.p.emplace(j, power_product(lo, hi));
    }
    for (int t = k + 1; t <= omega - 1; ++t) {
      const int e = 1 << t;
      if (e / 2 > d) break;
      const Ciphertext& half = basis.p.at(e / 2);
      basis.p.emplace(e, power_product(half, half));
    }
    return basis;
  }

  // Recursive split p(u) = u^{2^m} q(u) + R(u); leaves are evaluated
  // directly against the power basis. `want_scale` is imposed so adds meet
  // exactly; levels are aligned by dropping.
  Node eval_node(std::span<const double> coeffs, const PowerBasis& basis,
                 int k, double want_scale) const {
    int d = int(coeffs.size()) - 1;
    while (d > 0 && coeffs[size_t(d)] == 0.0) --d;
    if (d == 0) return Node{std::nullopt, coeffs[0]};
    if (d <= (1 << k)) return eval_leaf(coeffs.first(size_t(d) + 1), basis, want_scale);

    int m = 0;
    while ((1 << (m + 1)) <= d) ++m;
    const int g = 1 << m;
    const Ciphertext& gpow = basis.p.at(g);
    std::span<const double> q_coeffs = coeffs.subspan(size_t(g));
    std::span<const double> r_coeffs = coeffs.first(size_t(g));

    // Plan the product level so the q-branch scale can be solved exactly.
    const int lq = plan_level(q_coeffs, basis, k);
    const int lm = std::min(gpow.level(), lq);
    const double q_drop = double(ctx_.ring().main_modulus(lm));
    Node q = eval_node(q_coeffs, basis, k,
                       want_scale * q_drop / gpow.scale);

    Ciphertext prod;
    if (q.ct.has_value()) {
      Ciphertext a = ctx_.drop_to_level(gpow, lm);
      Ciphertext b = ctx_.drop_to_level(*q.ct, lm);
      prod = ctx_.rescale(ctx_.mult_relin(a, b, rlk_));
    } else {
      // Constant quotient: a plaintext product keeps the same depth.
      Ciphertext a = ctx_.drop_to_level(gpow, lm);
      Plaintext c = ctx_.encode_constant(
          q.constant, want_scale * q_drop / gpow.scale, lm);
      prod = ctx_.rescale(ctx_.mult_plain(a, c));
    }

    Node r = eval_node(r_coeffs, basis, k, want_scale);
    if (!r.ct.has_value()) {
      if (r.constant != 0.0) {
        Plaintext rc =
            ctx_.encode_constant(r.constant, prod.scale, prod.level());
        prod = ctx_.add_plain(prod, rc);
      }
      return Node{prod, 0.0};
    }
    const int lvl = std::min(prod.level(), r.ct->level());
    Ciphertext sum = ctx_.add(ctx_.drop_to_level(prod, lvl),
                              ctx_.drop_to_level(*r.ct, lvl));
    return Node{sum, 0.0};
  }

  Node eval_leaf(std::span<const double> coeffs, const PowerBasis& basis,
                 double want_scale) const {
    const int d = int(coeffs.size()) - 1;
    // Align every used power to the deepest one.
    int align = basis.p.at(1).level();
    for (int i = 1; i <= d; ++i)
      if (coeffs[size_t(i)] != 0.0) align = std::min(align, basis.p.at(i).level());
    const double q_drop = double(ctx_.ring().main_modulus(align));
    std::optional<Ciphertext> acc;
    for (int i = 1; i <= d; ++i) {
      if (coeffs[size_t(i)] == 0.0) continue;
      Ciphertext pw = ctx_.drop_to_level(basis.p.at(i), align);
      Plaintext c = ctx_.encode_constant(
          coeffs[size_t(i)], want_scale * q_drop / pw.scale, align);
      Ciphertext term = ctx_.rescale(ctx_.mult_plain(pw, c));
      acc = acc.has_value() ? ctx_.add(*acc, term) : term;
    }
    if (!acc.has_value()) return Node{std::nullopt, coeffs[0]};
    if (coeffs[0] != 0.0) {
      Plaintext c0 = ctx_.encode_constant(coeffs[0], acc->scale, acc->level());
      acc = ctx_.add_plain(*acc, c0);
    }
    return Node{acc, 0.0};
  }

  // Natural output level of a node, without evaluating it.
  int plan_level(std::span<const double> coeffs, const PowerBasis& basis,
                 int k) const {
    int d = int(coeffs.size()) - 1;
    while (d > 0 && coeffs[size_t(d)] == 0.0) --d;
    if (d == 0) return ctx_.top_level() + 1;  // constants impose no level
    if (d <= (1 << k)) {
      int align = basis.p.at(1).level();
      for (int i = 1; i <= d; ++i)
        if (coeffs[size_t(i)] != 0.0)
          align = std::min(align, basis.p.at(i).level());
      return align - 1;
    }
    int m = 0;
    while ((1 << (m + 1)) <= d) ++m;
    const int g = 1 << m;
    const int lq = plan_level(coeffs.subspan(size_t(g)), basis, k);
    const int lprod = std::min(basis.p.at(g).level(), lq) - 1;
    const int lr = plan_level(coeffs.first(size_t(g)), basis, k);
    return std::min(lprod, lr);
  }

  const CkksContext& ctx_;
  const RelinKey& rlk_;
};

// ---- GLM activation dispatch ----

enum class GlmKind : uint8_t { kLinear = 0, kLogistic = 1, kMultinomial = 2 };

struct ActivationSpecs {
  ApproxSpec sigmoid_spec;   // logistic
  ApproxSpec soft_num;       // e^x, for the softmax numerator
  ApproxSpec recip;          // 1/x, for the softmax denominator and apMax
  ApproxSpec ap_exp;         // (1/h') e^{x/h}, for apMax weighting
  double h = 8.0;            // apMax spread constant; default (g1-a1)/2
  double h_prime = 3.0;      // apMax normalizer; default |cl|

  // Levels consumed by the logistic activation.
  int logistic_depth() const { return sigmoid_spec.depth(); }
};

inline ActivationSpecs default_activation_specs(int sigmoid_degree,
                                                int softmax_degree,
                                                size_t n_classes) {
  ActivationSpecs s;
  s.sigmoid_spec = fit_least_squares(sigmoid, ApproxTarget::kSigmoid, -8.0,
                                     8.0, sigmoid_degree);
  s.soft_num = fit_chebyshev([](double x) { return std::exp(x); },
                             ApproxTarget::kExpScaled, -8.0, 2.0,
                             softmax_degree);
  s.recip = fit_chebyshev([](double x) { return 1.0 / x; },
                          ApproxTarget::kReciprocal, 0.2,
                          2.0 * double(n_classes), softmax_degree);
  s.h = 8.0;
  s.h_prime = double(n_classes);
  s.ap_exp = fit_chebyshev(
      [&s](double x) { return std::exp(x / s.h) / s.h_prime; },
      ApproxTarget::kExpScaled, -8.0, 8.0, softmax_degree);
  return s;
}

// Columnwise approximate max of the |cl| rows via exponential weighting:
// weights come from the sum-shifted rows, and are applied to the original
// rows so that equal rows pass through unchanged.
inline Ciphertext ap_max(const CkksContext& ctx,
                         const std::vector<Ciphertext>& rows,
                         const ActivationSpecs& specs, const RelinKey& rlk) {
  if (rows.empty()) throw UsageError("ap_max needs at least one row");
  AfEvaluator af(ctx, rlk);
  // u' = sum of rows; X = rows - u' (common per-column shift).
  Ciphertext usum = rows[0];
  for (size_t l = 1; l < rows.size(); ++l) usum = ctx.add(usum, rows[l]);
  std::vector<Ciphertext> weights;
  for (const auto& row : rows)
    weights.push_back(af.eval(ctx.sub(row, usum), specs.ap_exp));
  Ciphertext wsum = weights[0];
  for (size_t l = 1; l < weights.size(); ++l) wsum = ctx.add(wsum, weights[l]);
  Ciphertext inv = af.eval(wsum, specs.recip);
  // m = (sum_l row_l * weight_l) * inv, then normalized back to the default
  // scale so callers can subtract it from the rows directly.
  std::optional<Ciphertext> acc;
  for (size_t l = 0; l < rows.size(); ++l) {
    const int lvl = std::min(rows[l].level(), weights[l].level());
    Ciphertext term = ctx.rescale(
        ctx.mult_relin(ctx.drop_to_level(rows[l], lvl),
                       ctx.drop_to_level(weights[l], lvl), rlk));
    acc = acc.has_value() ? ctx.add(*acc, term) : term;
  }
  const int lvl = std::min(acc->level(), inv.level());
  Ciphertext m = ctx.rescale(ctx.mult_relin(ctx.drop_to_level(*acc, lvl),
                                            ctx.drop_to_level(inv, lvl), rlk));
  // Normalize scale to delta with a multiplication by ones.
  const double pt_scale =
      double(ctx.ring().main_modulus(m.level())) * ctx.delta() / m.scale;
  Plaintext ones = ctx.encode_constant(1.0, pt_scale, m.level());
  return ctx.rescale(ctx.mult_plain(m, ones));
}

// The activation function dispatch: linear passes through, logistic applies
// the fitted sigmoid, multinomial stabilizes by the approximate max and
// multiplies the numerator and reciprocal-denominator approximations.
inline Ciphertext activation(const CkksContext& ctx, const Ciphertext& u,
                             GlmKind kind, const ActivationSpecs& specs,
                             const RelinKey& rlk) {
  switch (kind) {
    case GlmKind::kLinear:
      return u;
    case GlmKind::kLogistic:
      return AfEvaluator(ctx, rlk).eval(u, specs.sigmoid_spec);
    case GlmKind::kMultinomial:
      throw UsageError("multinomial activation needs the matrix overload");
  }
  throw UsageError("unknown model kind");
}

inline std::vector<Ciphertext> activation_multinomial(
    const CkksContext& ctx, const std::vector<Ciphertext>& u_rows,
    const ActivationSpecs& specs, const RelinKey& rlk) {
  AfEvaluator af(ctx, rlk);
  Ciphertext m = ap_max(ctx, u_rows, specs, rlk);
  std::vector<Ciphertext> shifted;
  for (const auto& row : u_rows) {
    const int lvl = std::min(row.level(), m.level());
    shifted.push_back(ctx.sub(ctx.drop_to_level(row, lvl),
                              ctx.drop_to_level(m, lvl)));
  }
  std::vector<Ciphertext> numer;
  for (const auto& row : shifted) numer.push_back(af.eval(row, specs.soft_num));
  Ciphertext dsum = numer[0];
  for (size_t l = 1; l < numer.size(); ++l) dsum = ctx.add(dsum, numer[l]);
  Ciphertext denom = af.eval(dsum, specs.recip);
  std::vector<Ciphertext> out;
  for (const auto& e : numer) {
    const int lvl = std::min(e.level(), denom.level());
    out.push_back(ctx.rescale(ctx.mult_relin(ctx.drop_to_level(e, lvl),
                                             ctx.drop_to_level(denom, lvl),
                                             rlk)));
  }
  return out;
}

}  // namespace loom
