#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gchol/densela.hpp"
#include "gchol/genchol.hpp"
#include "gchol/matrix.hpp"

namespace gchol {

// Perturbation bounds for the generalized Cholesky factor.
//
// Every infimum over positive diagonal scalings D is approximated by the
// minimum over a finite ScalingCandidateSet, and the winning candidate's
// label is reported alongside the value.

enum class ScalingPurpose { kappa_min, componentwise };

struct ScalingCandidateSet {
  std::vector<DiagScaling> candidates;
  std::vector<std::string> labels;

  std::size_t size() const noexcept { return candidates.size(); }
};

/// Candidates for the scaling infimum. kappa_min gives {identity,
/// col-equilibrate-L}; componentwise adds row-equilibrate-bauer, which
/// equilibrates the rows of |L^{-1}||L|.
ScalingCandidateSet scaling_candidates(const Matrix& l, ScalingPurpose purpose);

ScalingCandidateSet identity_candidates(std::size_t order);

struct LabeledBound {
  double value = 0.0;
  std::string label;
};

/// Norms of a factor that every normwise bound reuses.
struct NormwiseContext {
  struct Candidate {
    std::string label;
    double kappa_ld = 0.0;   // kappa_2(L D^{-1})
    double dlinv_2 = 0.0;    // ||D L^{-1}||_2
    double dinv_2 = 0.0;     // ||D^{-1}||_2
  };

  Matrix l;
  Matrix l_inv;
  double l_2 = 0.0;
  double linv_2 = 0.0;
  double linv_f = 0.0;
  double kappa_l = 0.0;
  std::vector<Candidate> candidates;

  static NormwiseContext build(const Matrix& l, const ScalingCandidateSet& d);

  /// Candidate with the smallest kappa_2(L D^{-1}); ties keep the earlier.
  const Candidate& best() const;
};

// Normwise hypotheses. Strict comparisons, no tolerance.

/// ||L^{-1}||_2^2 ||dK||_F < 1/2.
bool normwise_condition_holds(const Matrix& l, double dk_fro);
bool normwise_condition_holds(const NormwiseContext& ctx, double dk_fro);

/// ||L^{-1}||_F^2 ||dK||_F < 1/2, hypothesis of the classic bound.
bool classic_condition_holds(const NormwiseContext& ctx, double dk_fro);

/// ||W^{-1}||_2^2 ||dK||_F < 1/4.
bool vector_equation_condition_holds(double w_inv_norm, double dk_fro);

/// Left side of the refined-approach hypothesis for one candidate:
/// kappa_2(L) ||L||_2 ||D L^{-1}||_2 ||D^{-1}||_2 ||dK||_F / ||K||_2.
double refined_condition_lhs(const NormwiseContext& ctx,
                             const NormwiseContext::Candidate& cand,
                             double dk_fro, double k_2);

// Normwise bounds on ||dL||_F. Each throws ConditionViolated when its
// hypothesis fails.

/// sqrt(2) ||L^{-1}||_2 min_D kappa_2(L D^{-1}) ||dK||_F /
/// (sqrt(2) - 1 + sqrt(1 - 2 ||L^{-1}||_2^2 ||dK||_F)).
LabeledBound scaled_rigorous_bound(const Matrix& l, double dk_fro,
                                   const ScalingCandidateSet& d);
LabeledBound scaled_rigorous_bound(const NormwiseContext& ctx, double dk_fro);

/// (2 + sqrt(2)) ||L^{-1}||_2 min_D kappa_2(L D^{-1}) ||dK||_F.
LabeledBound scaled_linear_bound(const Matrix& l, double dk_fro,
                                 const ScalingCandidateSet& d);
LabeledBound scaled_linear_bound(const NormwiseContext& ctx, double dk_fro);

/// Leading term ||L^{-1}||_2 min_D kappa_2(L D^{-1}) ||dK||_F. No
/// hypothesis; the second-order remainder is dropped.
double first_order_bound(const Matrix& l, double dk_fro,
                         const ScalingCandidateSet& d);
double first_order_bound(const NormwiseContext& ctx, double dk_fro);

/// Classic matrix-equation bound with the Frobenius-norm hypothesis.
double classic_frobenius_bound(const Matrix& l, double dk_fro);
double classic_frobenius_bound(const NormwiseContext& ctx, double dk_fro);

/// Classic bound with its denominator tightened to the spectral norm.
double classic_spectral_bound(const Matrix& l, double dk_fro);
double classic_spectral_bound(const NormwiseContext& ctx, double dk_fro);

/// scaled_rigorous_bound at D = I.
double unscaled_rigorous_bound(const Matrix& l, double dk_fro);
double unscaled_rigorous_bound(const NormwiseContext& ctx, double dk_fro);

/// 2 ||W^{-1}||_2 ||dK||_F from the matrix-vector equation approach.
double vector_equation_bound(double w_inv_norm, double dk_fro);

struct RefinedBound {
  LabeledBound bound;
  std::vector<std::string> excluded;  // candidates failing the hypothesis
};

/// Refined matrix-equation bound, minimized over the candidates that
/// satisfy its own hypothesis.
RefinedBound refined_equation_bound(const Matrix& l, const Matrix& k,
                                    double dk_fro,
                                    const ScalingCandidateSet& d);
RefinedBound refined_equation_bound(const NormwiseContext& ctx, double k_2,
                                    double dk_fro);

// Componentwise perturbations |dK| <= eps |L~| |L~^T|.

enum class EpsConvention { min_paper, max_safe };

const char* to_string(EpsConvention c);
EpsConvention eps_convention_from_string(const std::string& s);

/// min or max of {gamma_{3m+1}, gamma_{3n+1}}.
double componentwise_eps(std::size_t m, std::size_t n, double u,
                         EpsConvention convention);

struct ComponentwiseContext {
  struct Candidate {
    std::string label;
    double product = 0.0;  // ||L~ D^{-1}||_2 ||D |L~^{-1}| |L~| ||_2
  };

  Matrix l;
  Matrix abs_inv_abs;        // |L~^{-1}| |L~|
  double cond_l = 0.0;       // cond_F(L~)
  double cond_linv_t = 0.0;  // cond_F(L~^{-T})
  std::vector<Candidate> candidates;

  static ComponentwiseContext build(const Matrix& l_tilde,
                                    const ScalingCandidateSet& d);
  const Candidate& best() const;
};

/// cond_F(L~) cond_F(L~^{-T}) eps < 1/2.
bool componentwise_condition_holds(const Matrix& l_tilde, double eps);
bool componentwise_condition_holds(const ComponentwiseContext& ctx, double eps);

LabeledBound componentwise_rigorous_bound(const Matrix& l_tilde, double eps,
                                          const ScalingCandidateSet& d);
LabeledBound componentwise_rigorous_bound(const ComponentwiseContext& ctx,
                                          double eps);

double componentwise_linear_bound(const Matrix& l_tilde, double eps,
                                  const ScalingCandidateSet& d);
double componentwise_linear_bound(const ComponentwiseContext& ctx, double eps);

double componentwise_first_order_bound(const Matrix& l_tilde, double eps,
                                       const ScalingCandidateSet& d);
double componentwise_first_order_bound(const ComponentwiseContext& ctx,
                                       double eps);

// Reports. Field names are the serialized names.

struct NormwiseBoundReport {
  double dk_fro = 0.0;
  double linv_2 = 0.0;
  bool cond_3_1_ok = false;
  bool cond_3_12_ok = false;
  std::optional<bool> cond_3_16_ok;  // empty when W was not built
  bool cond_3_18_ok = false;
  std::optional<double> b_3_3;
  std::string b_3_3_label;
  std::optional<double> b_3_4;
  std::string b_3_4_label;
  double b_3_11_coeff = 0.0;
  std::optional<double> b_3_12;
  std::optional<double> b_3_13;
  std::optional<double> b_3_14;
  std::optional<double> b_3_15;
  std::optional<double> b_3_17;
  std::string b_3_17_label;
  std::vector<std::string> b_3_17_excluded;
  std::optional<double> actual_dl_fro;
  std::optional<double> actual_dl_2;
  bool near_boundary = false;
};

struct NormwiseOptions {
  bool with_w_bound = false;  // honoured only for order <= kMaxWOrder
  bool with_actual = false;
};

inline constexpr std::size_t kMaxWOrder = 24;

/// All normwise quantities for factor `l` of `k` under perturbation `dk`.
/// With `with_actual`, the true dL comes from factorizing K + dK; a
/// breakdown there propagates.
NormwiseBoundReport normwise_report(const GenCholFactor& l, const Matrix& k,
                                    const Matrix& dk,
                                    const NormwiseOptions& opts);

/// Variant reusing precomputed pieces; `w_inv_norm` < 0 means absent.
NormwiseBoundReport normwise_report(const NormwiseContext& ctx, double k_2,
                                    double dk_fro, double w_inv_norm);

struct ComponentwiseBoundReport {
  double eps = 0.0;
  std::string eps_convention;
  bool cond_4_2_ok = false;
  std::optional<double> b_4_3;
  std::string b_4_3_label;
  std::optional<double> b_4_4;
  double b_4_9_coeff = 0.0;
  double cond_bs_L = 0.0;
  double cond_bs_LinvT = 0.0;
  std::optional<double> actual_dl_fro;
  std::optional<double> actual_dl_2;
  bool near_boundary = false;
};

ComponentwiseBoundReport componentwise_report(const ComponentwiseContext& ctx,
                                              double eps,
                                              std::string convention_label);

}  // namespace gchol
