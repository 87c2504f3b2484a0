#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gchol/bounds.hpp"
#include "gchol/genchol.hpp"
#include "gchol/matrix.hpp"

namespace gchol {

using Rng = std::mt19937_64;

/// Stream for one trial, derived from seed XOR trial index so trials can
/// run in any order.
Rng trial_rng(std::uint64_t seed, std::size_t trial);
std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial);

// Random generators.

Matrix gen_gaussian(std::size_t rows, std::size_t cols, Rng& rng);

/// Haar-ish orthogonal matrix from Gram-Schmidt (with reorthogonalisation)
/// of a standard normal matrix.
Matrix gen_orthogonal(std::size_t order, Rng& rng);

/// Q diag(sigma) Q^T, sigma log-spaced from 1 down to 1/cond, symmetrised
/// exactly.
Matrix gen_spd(std::size_t order, double cond, Rng& rng);

/// G^T G with G of shape (order - rank_deficiency) x order.
Matrix gen_psd(std::size_t order, std::size_t rank_deficiency, Rng& rng);

/// n x m standard normal matrix with sigma_min > 0 (n <= m).
Matrix gen_fullrank(std::size_t n, std::size_t m, Rng& rng);

/// Symmetric matrix with Frobenius norm `target_fro`.
Matrix gen_sym_perturbation(std::size_t order, double target_fro, Rng& rng);

struct SaddleParams {
  double cond_a = 1.0;     // target kappa_2(A)
  double cond_s = 1.0;     // target kappa_2 of L21 L21^T inside the Schur block
  std::size_t c_deficiency = 0;
};

struct GeneratedSaddle {
  SaddleMatrix s;
  SaddleParams params;
};

/// Random valid saddle-point matrix. kappa_2(A) and the Schur-block target
/// are drawn log-uniformly from [1, cond_cap]. B is built as M L11^T with M
/// of unit norm, so L21 = M and the factor stays O(1) relative to K.
GeneratedSaddle gen_saddle(std::size_t m, std::size_t n, double cond_cap,
                           Rng& rng);

// Campaigns.

struct EnsembleConfig {
  std::size_t m = 4;
  std::size_t n = 3;
  std::size_t trials = 100;
  double cond_target = 1e4;
  std::vector<double> dk_levels{1e-8, 1e-4, 0.1, 0.4};
  std::uint64_t seed = 20140823;
  EpsConvention eps_convention = EpsConvention::max_safe;
  std::vector<double> eps_levels{1e-6};  // synthetic eps, componentwise runs
  bool with_w_bound = true;              // only for m + n <= kMaxWOrder

  /// Throws Error when a field is out of range.
  void validate() const;
};

inline constexpr int kMaxRetries = 100;
inline constexpr double kDominationSlack = 1e-12;

struct NormwiseTrialRecord {
  std::size_t trial = 0;
  std::size_t level_index = 0;
  std::size_t m = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  SaddleParams params;
  double dk_level = 0.0;
  NormwiseBoundReport report;
  double actual_f = 0.0;
  double actual_2 = 0.0;
  double linv_dl_f = 0.0;         // ||L^{-1} dL||_F
  double linv_dl_bound = 0.0;     // (1 - sqrt(1 - 2x)) / sqrt(2)
  double refined_lhs_min = 0.0;   // min over candidates of the refined lhs
  bool breakdown = false;
  double worst_ratio = 0.0;       // min bound / actual over rigorous bounds
  bool violation = false;
};

/// For each trial: random saddle matrix, one random symmetric direction,
/// scaled so ||L^{-1}||_2^2 ||dK||_F hits every dk_level. Records sorted by
/// (trial, level).
std::vector<NormwiseTrialRecord> run_normwise_campaign(
    const EnsembleConfig& cfg);

struct ComponentwiseTrialRecord {
  std::size_t trial = 0;
  std::size_t level_index = 0;
  std::size_t m = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  ComponentwiseBoundReport report;
  double eps_min_paper = 0.0;
  double eps_max_safe = 0.0;
  bool envelope_ok = false;          // sampled |dK| <= eps |L~||L~^T|
  bool skipped = false;              // hypothesis failed
  bool breakdown = false;
  double actual_f = 0.0;
  double actual_2 = 0.0;
  double fp_slack_eps = 0.0;         // 10 * eps under cfg.eps_convention
  std::size_t fp_envelope_violations = 0;
  double fp_max_ratio = 0.0;         // max |residual| / (eps * envelope)
  bool violation = false;
};

/// Synthetic-eps protocol: factor L~ of a random saddle matrix, dK sampled
/// uniformly inside eps |L~||L~^T| (symmetric), K = L~ J L~^T - dK, then
/// ||L~ - L||_F is compared with the componentwise rigorous bound. Each
/// trial also checks the compensated residual of L~ against
/// 10 eps |L~||L~^T|.
std::vector<ComponentwiseTrialRecord> run_componentwise_campaign(
    const EnsembleConfig& cfg);

// Adversarial 2x2 sweeps.

enum class SweepKind { column_scaling, w_conditioning };

const char* to_string(SweepKind k);
SweepKind sweep_kind_from_string(const std::string& s);

struct SweepRow {
  double gamma = 0.0;
  // column_scaling: L = [1/g 0; 1 1]
  double kappa_l = 0.0;
  double kappa_ld = 0.0;          // D = diag(1/g, 1)
  double kappa_ratio = 0.0;
  double dk_fro = 0.0;
  double b33 = 0.0;
  std::string b33_label;
  double b313 = 0.0;
  // w_conditioning: L = [1 0; g 1]
  double linv2_sq = 0.0;
  double winv2_sq = 0.0;
  double threshold_normwise = 0.0;  // sup dk for ||L^{-1}||^2 dk < 1/2
  double threshold_vector = 0.0;    // sup dk for ||W^{-1}||^2 dk < 1/4
  double b315 = 0.0;
  double b34 = 0.0;
  bool claim_ok = true;
};

struct SweepTable {
  SweepKind kind = SweepKind::column_scaling;
  std::vector<SweepRow> rows;
  /// Least-squares slope of log ||W^{-1}||_2 against log gamma over rows
  /// with gamma >= 10 (w_conditioning), or of log kappa ratio against
  /// log(1/gamma) over rows with gamma <= 1e-2 (column_scaling). NaN when
  /// fewer than two rows qualify.
  double slope = 0.0;
  std::size_t violations = 0;
};

inline constexpr double kSweepDk = 1e-8;

SweepTable run_gamma_sweep(SweepKind kind, const std::vector<double>& gammas);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gchol
