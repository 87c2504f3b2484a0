#include "gchol/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gchol/errors.hpp"
#include "gchol/oracle.hpp"

namespace gchol {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kTwoPlusSqrt2 = 2.0 + std::numbers::sqrt2;
constexpr double kScaleFloor = 1e-300;
constexpr double kNearBoundary = 1e-15;

void require_lower_nonsingular(const Matrix& l) {
  if (!is_lower_triangular(l)) {
    throw DimensionError("factor must be square lower triangular");
  }
  for (std::size_t i = 0; i < l.rows(); ++i) {
    if (l(i, i) == 0.0) throw SingularMatrixError("factor is singular");
  }
}

// sqrt(1 - 2 x) for the normwise and componentwise denominators.
double root_term(double x) { return std::sqrt(1.0 - 2.0 * x); }

}  // namespace

ScalingCandidateSet identity_candidates(std::size_t order) {
  return {{DiagScaling::identity(order)}, {"identity"}};
}

ScalingCandidateSet scaling_candidates(const Matrix& l,
                                       ScalingPurpose purpose) {
  require_lower_nonsingular(l);
  const std::size_t p = l.rows();
  ScalingCandidateSet set = identity_candidates(p);

  // Column equilibration of L D^{-1}.
  std::vector<double> col(p);
  for (std::size_t j = 0; j < p; ++j) {
    col[j] = std::max(fro_norm(l.block(0, j, p, 1)), kScaleFloor);
  }
  set.candidates.emplace_back(std::move(col));
  set.labels.emplace_back("col-equilibrate-L");

  if (purpose == ScalingPurpose::componentwise) {
    const Matrix m = matmul(abs(lower_tri_inverse(l)), abs(l));
    std::vector<double> row(p);
    for (std::size_t i = 0; i < p; ++i) {
      double mx = 0.0;
      for (double v : m.row(i)) mx = std::max(mx, v);
      row[i] = 1.0 / std::max(mx, kScaleFloor);
    }
    set.candidates.emplace_back(std::move(row));
    set.labels.emplace_back("row-equilibrate-bauer");
  }
  return set;
}

NormwiseContext NormwiseContext::build(const Matrix& l,
                                       const ScalingCandidateSet& d) {
  require_lower_nonsingular(l);
  if (d.size() == 0) throw Error("scaling candidate set is empty");
  NormwiseContext ctx;
  ctx.l = l;
  ctx.l_inv = lower_tri_inverse(l);
  ctx.l_2 = spectral_norm(l);
  ctx.linv_2 = spectral_norm(ctx.l_inv);
  ctx.linv_f = fro_norm(ctx.l_inv);
  ctx.kappa_l = ctx.l_2 * ctx.linv_2;
  for (std::size_t c = 0; c < d.size(); ++c) {
    const DiagScaling& dc = d.candidates[c];
    if (dc.order() != l.rows()) throw DimensionError("scaling order mismatch");
    Candidate cand;
    cand.label = d.labels[c];
    cand.dlinv_2 = spectral_norm(scale_rows(dc, ctx.l_inv));
    cand.kappa_ld = spectral_norm(unscale_cols(l, dc)) * cand.dlinv_2;
    double dmin = dc[0];
    for (double v : dc.diag()) dmin = std::min(dmin, v);
    cand.dinv_2 = 1.0 / dmin;
    ctx.candidates.push_back(std::move(cand));
  }
  return ctx;
}

const NormwiseContext::Candidate& NormwiseContext::best() const {
  const Candidate* b = &candidates.front();
  for (const auto& c : candidates) {
    if (c.kappa_ld < b->kappa_ld) b = &c;
  }
  return *b;
}

bool normwise_condition_holds(const NormwiseContext& ctx, double dk_fro) {
  return ctx.linv_2 * ctx.linv_2 * dk_fro < 0.5;
}

bool normwise_condition_holds(const Matrix& l, double dk_fro) {
  require_lower_nonsingular(l);
  const double n = spectral_norm(lower_tri_inverse(l));
  return n * n * dk_fro < 0.5;
}

bool classic_condition_holds(const NormwiseContext& ctx, double dk_fro) {
  return ctx.linv_f * ctx.linv_f * dk_fro < 0.5;
}

bool vector_equation_condition_holds(double w_inv_norm, double dk_fro) {
  return w_inv_norm * w_inv_norm * dk_fro < 0.25;
}

double refined_condition_lhs(const NormwiseContext& ctx,
                             const NormwiseContext::Candidate& cand,
                             double dk_fro, double k_2) {
  return ctx.kappa_l * ctx.l_2 * cand.dlinv_2 * cand.dinv_2 * (dk_fro / k_2);
}

namespace {

void require_normwise(const NormwiseContext& ctx, double dk_fro) {
  if (!normwise_condition_holds(ctx, dk_fro)) {
    throw ConditionViolated(
        "normwise", "||L^{-1}||_2^2 ||dK||_F < 1/2 does not hold");
  }
}

double scaled_rigorous_value(const NormwiseContext& ctx, double kappa,
                             double dk_fro) {
  const double x = ctx.linv_2 * ctx.linv_2 * dk_fro;
  return kSqrt2 * ctx.linv_2 * kappa * dk_fro /
         (kSqrt2 - 1.0 + root_term(x));
}

}  // namespace

LabeledBound scaled_rigorous_bound(const NormwiseContext& ctx, double dk_fro) {
  require_normwise(ctx, dk_fro);
  const auto& b = ctx.best();
  return {scaled_rigorous_value(ctx, b.kappa_ld, dk_fro), b.label};
}

LabeledBound scaled_rigorous_bound(const Matrix& l, double dk_fro,
                                   const ScalingCandidateSet& d) {
  return scaled_rigorous_bound(NormwiseContext::build(l, d), dk_fro);
}

double first_order_bound(const NormwiseContext& ctx, double dk_fro) {
  return ctx.linv_2 * ctx.best().kappa_ld * dk_fro;
}

double first_order_bound(const Matrix& l, double dk_fro,
                         const ScalingCandidateSet& d) {
  return first_order_bound(NormwiseContext::build(l, d), dk_fro);
}

LabeledBound scaled_linear_bound(const NormwiseContext& ctx, double dk_fro) {
  require_normwise(ctx, dk_fro);
  return {kTwoPlusSqrt2 * first_order_bound(ctx, dk_fro), ctx.best().label};
}

LabeledBound scaled_linear_bound(const Matrix& l, double dk_fro,
                                 const ScalingCandidateSet& d) {
  return scaled_linear_bound(NormwiseContext::build(l, d), dk_fro);
}

double classic_frobenius_bound(const NormwiseContext& ctx, double dk_fro) {
  if (!classic_condition_holds(ctx, dk_fro)) {
    throw ConditionViolated(
        "classic", "||L^{-1}||_F^2 ||dK||_F < 1/2 does not hold");
  }
  const double x = ctx.linv_f * ctx.linv_f * dk_fro;
  return kSqrt2 * ctx.linv_2 * ctx.kappa_l * dk_fro / (1.0 + root_term(x));
}

double classic_frobenius_bound(const Matrix& l, double dk_fro) {
  return classic_frobenius_bound(
      NormwiseContext::build(l, identity_candidates(l.rows())), dk_fro);
}

double classic_spectral_bound(const NormwiseContext& ctx, double dk_fro) {
  require_normwise(ctx, dk_fro);
  const double x = ctx.linv_2 * ctx.linv_2 * dk_fro;
  return kSqrt2 * ctx.linv_2 * ctx.kappa_l * dk_fro / (1.0 + root_term(x));
}

double classic_spectral_bound(const Matrix& l, double dk_fro) {
  return classic_spectral_bound(
      NormwiseContext::build(l, identity_candidates(l.rows())), dk_fro);
}

double unscaled_rigorous_bound(const NormwiseContext& ctx, double dk_fro) {
  require_normwise(ctx, dk_fro);
  return scaled_rigorous_value(ctx, ctx.kappa_l, dk_fro);
}

double unscaled_rigorous_bound(const Matrix& l, double dk_fro) {
  return unscaled_rigorous_bound(
      NormwiseContext::build(l, identity_candidates(l.rows())), dk_fro);
}

double vector_equation_bound(double w_inv_norm, double dk_fro) {
  if (!vector_equation_condition_holds(w_inv_norm, dk_fro)) {
    throw ConditionViolated(
        "vector-equation", "||W^{-1}||_2^2 ||dK||_F < 1/4 does not hold");
  }
  return 2.0 * w_inv_norm * dk_fro;
}

RefinedBound refined_equation_bound(const NormwiseContext& ctx, double k_2,
                                    double dk_fro) {
  RefinedBound out;
  bool found = false;
  for (const auto& c : ctx.candidates) {
    const double lhs = refined_condition_lhs(ctx, c, dk_fro, k_2);
    if (!(lhs < 0.25)) {
      out.excluded.push_back(c.label);
      continue;
    }
    const double value = 2.0 * ctx.l_2 * ctx.kappa_l * c.kappa_ld *
                         (dk_fro / k_2) /
                         (1.0 + std::sqrt(1.0 - 4.0 * lhs));
    if (!found || value < out.bound.value) {
      out.bound = {value, c.label};
      found = true;
    }
  }
  if (!found) {
    throw ConditionViolated(
        "refined", "no scaling candidate satisfies the refined hypothesis");
  }
  return out;
}

RefinedBound refined_equation_bound(const Matrix& l, const Matrix& k,
                                    double dk_fro,
                                    const ScalingCandidateSet& d) {
  return refined_equation_bound(NormwiseContext::build(l, d), spectral_norm(k),
                                dk_fro);
}

const char* to_string(EpsConvention c) {
  return c == EpsConvention::min_paper ? "min-paper" : "max-safe";
}

EpsConvention eps_convention_from_string(const std::string& s) {
  if (s == "min-paper") return EpsConvention::min_paper;
  if (s == "max-safe") return EpsConvention::max_safe;
  throw Error("unknown eps convention '" + s + "'");
}

double componentwise_eps(std::size_t m, std::size_t n, double u,
                         EpsConvention convention) {
  const double gm = gamma_k(3 * m + 1, u);
  const double gn = gamma_k(3 * n + 1, u);
  return convention == EpsConvention::min_paper ? std::min(gm, gn)
                                                : std::max(gm, gn);
}

ComponentwiseContext ComponentwiseContext::build(
    const Matrix& l_tilde, const ScalingCandidateSet& d) {
  require_lower_nonsingular(l_tilde);
  if (d.size() == 0) throw Error("scaling candidate set is empty");
  ComponentwiseContext ctx;
  ctx.l = l_tilde;
  const Matrix l_inv = lower_tri_inverse(l_tilde);
  ctx.abs_inv_abs = matmul(abs(l_inv), abs(l_tilde));
  ctx.cond_l = fro_norm(ctx.abs_inv_abs);
  ctx.cond_linv_t = cond_bauer_skeel(transpose(l_inv));
  for (std::size_t c = 0; c < d.size(); ++c) {
    const DiagScaling& dc = d.candidates[c];
    if (dc.order() != l_tilde.rows()) {
      throw DimensionError("scaling order mismatch");
    }
    ctx.candidates.push_back(
        {d.labels[c], spectral_norm(unscale_cols(l_tilde, dc)) *
                          spectral_norm(scale_rows(dc, ctx.abs_inv_abs))});
  }
  return ctx;
}

const ComponentwiseContext::Candidate& ComponentwiseContext::best() const {
  const Candidate* b = &candidates.front();
  for (const auto& c : candidates) {
    if (c.product < b->product) b = &c;
  }
  return *b;
}

bool componentwise_condition_holds(const ComponentwiseContext& ctx,
                                   double eps) {
  return ctx.cond_l * ctx.cond_linv_t * eps < 0.5;
}

bool componentwise_condition_holds(const Matrix& l_tilde, double eps) {
  require_lower_nonsingular(l_tilde);
  return cond_bauer_skeel(l_tilde) *
             cond_bauer_skeel(transpose(lower_tri_inverse(l_tilde))) * eps <
         0.5;
}

namespace {

void require_componentwise(const ComponentwiseContext& ctx, double eps) {
  if (!componentwise_condition_holds(ctx, eps)) {
    throw ConditionViolated(
        "componentwise",
        "cond_F(L~) cond_F(L~^{-T}) eps < 1/2 does not hold");
  }
}

}  // namespace

double componentwise_first_order_bound(const ComponentwiseContext& ctx,
                                       double eps) {
  return ctx.best().product * ctx.cond_l * eps;
}

double componentwise_first_order_bound(const Matrix& l_tilde, double eps,
                                       const ScalingCandidateSet& d) {
  return componentwise_first_order_bound(ComponentwiseContext::build(l_tilde, d),
                                         eps);
}

LabeledBound componentwise_rigorous_bound(const ComponentwiseContext& ctx,
                                          double eps) {
  require_componentwise(ctx, eps);
  const auto& b = ctx.best();
  const double x = ctx.cond_l * ctx.cond_linv_t * eps;
  return {kSqrt2 * b.product * ctx.cond_l * eps /
              (kSqrt2 - 1.0 + root_term(x)),
          b.label};
}

LabeledBound componentwise_rigorous_bound(const Matrix& l_tilde, double eps,
                                          const ScalingCandidateSet& d) {
  return componentwise_rigorous_bound(ComponentwiseContext::build(l_tilde, d),
                                      eps);
}

double componentwise_linear_bound(const ComponentwiseContext& ctx, double eps) {
  require_componentwise(ctx, eps);
  return kTwoPlusSqrt2 * componentwise_first_order_bound(ctx, eps);
}

double componentwise_linear_bound(const Matrix& l_tilde, double eps,
                                  const ScalingCandidateSet& d) {
  return componentwise_linear_bound(ComponentwiseContext::build(l_tilde, d),
                                    eps);
}

NormwiseBoundReport normwise_report(const NormwiseContext& ctx, double k_2,
                                    double dk_fro, double w_inv_norm) {
  NormwiseBoundReport r;
  r.dk_fro = dk_fro;
  r.linv_2 = ctx.linv_2;
  r.cond_3_1_ok = normwise_condition_holds(ctx, dk_fro);
  r.cond_3_12_ok = classic_condition_holds(ctx, dk_fro);
  r.b_3_11_coeff = first_order_bound(ctx, dk_fro);

  if (r.cond_3_1_ok) {
    const auto b33 = scaled_rigorous_bound(ctx, dk_fro);
    const auto b34 = scaled_linear_bound(ctx, dk_fro);
    r.b_3_3 = b33.value;
    r.b_3_3_label = b33.label;
    r.b_3_4 = b34.value;
    r.b_3_4_label = b34.label;
    r.b_3_13 = classic_spectral_bound(ctx, dk_fro);
    r.b_3_14 = unscaled_rigorous_bound(ctx, dk_fro);
    const double disc = 1.0 - 2.0 * ctx.linv_2 * ctx.linv_2 * dk_fro;
    r.near_boundary = disc <= kNearBoundary;
  }
  if (r.cond_3_12_ok) r.b_3_12 = classic_frobenius_bound(ctx, dk_fro);

  if (w_inv_norm >= 0.0) {
    r.cond_3_16_ok = vector_equation_condition_holds(w_inv_norm, dk_fro);
    if (*r.cond_3_16_ok) r.b_3_15 = vector_equation_bound(w_inv_norm, dk_fro);
  }

  try {
    auto refined = refined_equation_bound(ctx, k_2, dk_fro);
    r.cond_3_18_ok = true;
    r.b_3_17 = refined.bound.value;
    r.b_3_17_label = refined.bound.label;
    r.b_3_17_excluded = std::move(refined.excluded);
  } catch (const ConditionViolated&) {
    r.cond_3_18_ok = false;
    for (const auto& c : ctx.candidates) r.b_3_17_excluded.push_back(c.label);
  }
  return r;
}

NormwiseBoundReport normwise_report(const GenCholFactor& l, const Matrix& k,
                                    const Matrix& dk,
                                    const NormwiseOptions& opts) {
  const Matrix dense = factor_to_dense(l);
  const auto ctx = NormwiseContext::build(
      dense, scaling_candidates(dense, ScalingPurpose::kappa_min));
  double w_inv = -1.0;
  if (opts.with_w_bound && dense.rows() <= kMaxWOrder) {
    w_inv = w_inverse_norm(build_w(l));
  }
  auto r = normwise_report(ctx, spectral_norm(k), fro_norm(dk), w_inv);
  if (opts.with_actual) {
    const Matrix dl = actual_delta_l(k, l.spec(), dk);
    r.actual_dl_fro = fro_norm(dl);
    r.actual_dl_2 = spectral_norm(dl);
  }
  return r;
}

ComponentwiseBoundReport componentwise_report(const ComponentwiseContext& ctx,
                                              double eps,
                                              std::string convention_label) {
  ComponentwiseBoundReport r;
  r.eps = eps;
  r.eps_convention = std::move(convention_label);
  r.cond_bs_L = ctx.cond_l;
  r.cond_bs_LinvT = ctx.cond_linv_t;
  r.cond_4_2_ok = componentwise_condition_holds(ctx, eps);
  r.b_4_9_coeff = componentwise_first_order_bound(ctx, eps);
  if (r.cond_4_2_ok) {
    const auto b43 = componentwise_rigorous_bound(ctx, eps);
    r.b_4_3 = b43.value;
    r.b_4_3_label = b43.label;
    r.b_4_4 = componentwise_linear_bound(ctx, eps);
    r.near_boundary =
        1.0 - 2.0 * ctx.cond_l * ctx.cond_linv_t * eps <= kNearBoundary;
  }
  return r;
}

}  // namespace gchol
