#include "gchol/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gchol/densela.hpp"
#include "gchol/errors.hpp"
#include "gchol/oracle.hpp"

namespace gchol {

namespace {

// splitmix64 finaliser, decorrelates neighbouring trial seeds.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

double log_uniform(double cap, Rng& rng) {
  return cap <= 1.0 ? 1.0 : std::exp(uniform01(rng) * std::log(cap));
}

// sigma_i = cond^{-i/(k-1)}, i = 0..k-1.
std::vector<double> log_spaced(std::size_t k, double cond) {
  std::vector<double> s(k, 1.0);
  for (std::size_t i = 1; i < k; ++i) {
    s[i] = std::pow(cond, -static_cast<double>(i) / static_cast<double>(k - 1));
  }
  return s;
}

Matrix symmetrize(const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = 0.5 * (x(i, j) + x(j, i));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
  return seed ^ static_cast<std::uint64_t>(trial);
}

Rng trial_rng(std::uint64_t seed, std::size_t trial) {
  return Rng(mix(trial_seed(seed, trial)));
}

Matrix gen_gaussian(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) g(i, j) = normal(rng);
  }
  return g;
}

Matrix gen_orthogonal(std::size_t order, Rng& rng) {
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    Matrix q = gen_gaussian(order, order, rng);
    bool ok = true;
    for (std::size_t j = 0; j < order && ok; ++j) {
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < j; ++k) {
          double d = 0.0;
          for (std::size_t i = 0; i < order; ++i) d += q(i, k) * q(i, j);
          for (std::size_t i = 0; i < order; ++i) q(i, j) -= d * q(i, k);
        }
      }
      const double nrm = fro_norm(q.block(0, j, order, 1));
      if (!(nrm > 1e-8)) {
        ok = false;
        break;
      }
      for (std::size_t i = 0; i < order; ++i) q(i, j) /= nrm;
    }
    if (ok) return q;
  }
  throw Error("gen_orthogonal: retry cap reached");
}

Matrix gen_spd(std::size_t order, double cond, Rng& rng) {
  if (!(cond >= 1.0)) throw Error("gen_spd: cond must be >= 1");
  if (order == 1) return Matrix{{1.0}};
  const Matrix q = gen_orthogonal(order, rng);
  const auto sigma = log_spaced(order, cond);
  return symmetrize(matmul(scale_cols(q, DiagScaling(sigma)), transpose(q)));
}

Matrix gen_psd(std::size_t order, std::size_t rank_deficiency, Rng& rng) {
  if (rank_deficiency > order) throw Error("gen_psd: deficiency exceeds order");
  const Matrix g = gen_gaussian(order - rank_deficiency, order, rng);
  return matmul(transpose(g), g);
}

Matrix gen_fullrank(std::size_t n, std::size_t m, Rng& rng) {
  if (n > m) throw Error("gen_fullrank: requires n <= m");
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    Matrix b = gen_gaussian(n, m, rng);
    if (n == 0) return b;
    const auto sigma = singular_values(b);
    if (sigma.back() > 1e-12 * sigma.front()) return b;
  }
  throw Error("gen_fullrank: retry cap reached");
}

Matrix gen_sym_perturbation(std::size_t order, double target_fro, Rng& rng) {
  if (!(target_fro > 0.0)) throw Error("gen_sym_perturbation: target must be > 0");
  Matrix s;
  double nrm = 0.0;
  for (int attempt = 0; attempt < kMaxRetries && !(nrm > 0.0); ++attempt) {
    s = symmetrize(gen_gaussian(order, order, rng));
    nrm = fro_norm(s);
  }
  if (!(nrm > 0.0)) throw Error("gen_sym_perturbation: retry cap reached");
  return scale(s, target_fro / nrm);
}

GeneratedSaddle gen_saddle(std::size_t m, std::size_t n, double cond_cap,
                           Rng& rng) {
  if (n > m) throw Error("gen_saddle: B needs full row rank, so n <= m");
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    try {
      SaddleParams params;
      params.cond_a = log_uniform(cond_cap, rng);
      params.cond_s = log_uniform(cond_cap, rng);
      params.c_deficiency =
          n == 0 ? 0 : std::uniform_int_distribution<std::size_t>(0, n)(rng);

      Matrix a = gen_spd(m, params.cond_a, rng);
      const Matrix l11 = cholesky_lower(a);

      Matrix mfac(n, m);
      if (n > 0) {
        const Matrix u = gen_orthogonal(n, rng);
        const Matrix v = gen_orthogonal(m, rng).block(0, 0, m, n);
        const auto s = log_spaced(n, std::sqrt(params.cond_s));
        mfac = matmul(scale_cols(u, DiagScaling(s)), transpose(v));
      }
      Matrix b = matmul(mfac, transpose(l11));

      Matrix c = gen_psd(n, params.c_deficiency, rng);
      const double cn = spectral_norm(c);
      if (cn > 0.0) c = scale(c, uniform01(rng) / cn);

      return {SaddleMatrix::from_blocks(std::move(a), std::move(b), std::move(c)),
              params};
    } catch (const Error&) {
      // degenerate draw, try again
    }
  }
  throw Error("gen_saddle: retry cap reached");
}

void EnsembleConfig::validate() const {
  if (m < 1) throw Error("m must be >= 1");
  if (n > m) throw Error("n must not exceed m (B needs full row rank)");
  if (trials < 1) throw Error("trials must be >= 1");
  if (!(cond_target >= 1.0)) throw Error("cond target must be >= 1");
  for (double d : dk_levels) {
    if (!(d > 0.0 && d < 0.5)) throw Error("every dk level must lie in (0, 0.5)");
  }
  for (double e : eps_levels) {
    if (!(e >= 0.0 && e < 1.0)) throw Error("every eps level must lie in [0, 1)");
  }
}

namespace {

struct FactoredTrial {
  GeneratedSaddle gen;
  GenCholFactor factor;
};

FactoredTrial factored_trial(const EnsembleConfig& cfg, Rng& rng) {
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    auto gen = gen_saddle(cfg.m, cfg.n, cfg.cond_target, rng);
    try {
      auto factor = factorize(gen.s);
      return {std::move(gen), std::move(factor)};
    } catch (const FactorizationError&) {
      // regenerate
    }
  }
  throw Error("factorization retry cap reached");
}

void check_bound(const std::optional<double>& b, double actual,
                 NormwiseTrialRecord& rec) {
  if (!b) return;
  if (actual > *b + kDominationSlack) rec.violation = true;
  if (actual > 0.0) rec.worst_ratio = std::min(rec.worst_ratio, *b / actual);
}

}  // namespace

std::vector<NormwiseTrialRecord> run_normwise_campaign(
    const EnsembleConfig& cfg) {
  cfg.validate();
  std::vector<NormwiseTrialRecord> out;
  if (cfg.dk_levels.empty()) return out;
  const BlockSpec spec(cfg.m, cfg.n);
  const std::size_t p = spec.order();

  for (std::size_t t = 0; t < cfg.trials; ++t) {
    Rng rng = trial_rng(cfg.seed, t);
    const auto trial = factored_trial(cfg, rng);
    const Matrix k = assemble_k(trial.gen.s);
    const Matrix l = factor_to_dense(trial.factor);
    const auto ctx = NormwiseContext::build(
        l, scaling_candidates(l, ScalingPurpose::kappa_min));
    const double k_2 = spectral_norm(k);
    const double w_inv = cfg.with_w_bound && p <= kMaxWOrder
                             ? w_inverse_norm(build_w(trial.factor))
                             : -1.0;
    const Matrix direction = gen_sym_perturbation(p, 1.0, rng);

    for (std::size_t li = 0; li < cfg.dk_levels.size(); ++li) {
      NormwiseTrialRecord rec;
      rec.trial = t;
      rec.level_index = li;
      rec.m = cfg.m;
      rec.n = cfg.n;
      rec.seed = trial_seed(cfg.seed, t);
      rec.params = trial.gen.params;
      rec.dk_level = cfg.dk_levels[li];

      const Matrix dk =
          scale(direction, cfg.dk_levels[li] / (ctx.linv_2 * ctx.linv_2));
      const double dk_fro = fro_norm(dk);
      rec.report = normwise_report(ctx, k_2, dk_fro, w_inv);

      rec.refined_lhs_min = std::numeric_limits<double>::infinity();
      for (const auto& c : ctx.candidates) {
        rec.refined_lhs_min = std::min(
            rec.refined_lhs_min, refined_condition_lhs(ctx, c, dk_fro, k_2));
      }

      rec.worst_ratio = std::numeric_limits<double>::infinity();
      try {
        const Matrix dl =
            delta_factor(factorize_dense(add(k, dk), spec), trial.factor);
        rec.actual_f = fro_norm(dl);
        rec.actual_2 = spectral_norm(dl);
        rec.report.actual_dl_fro = rec.actual_f;
        rec.report.actual_dl_2 = rec.actual_2;

        const auto& r = rec.report;
        for (const auto* b : {&r.b_3_3, &r.b_3_4, &r.b_3_12, &r.b_3_13,
                              &r.b_3_14, &r.b_3_15, &r.b_3_17}) {
          check_bound(*b, rec.actual_f, rec);
        }

        if (r.cond_3_1_ok) {
          const double x = ctx.linv_2 * ctx.linv_2 * dk_fro;
          rec.linv_dl_f = fro_norm(matmul(ctx.l_inv, dl));
          rec.linv_dl_bound =
              (1.0 - std::sqrt(1.0 - 2.0 * x)) / std::numbers::sqrt2;
          if (rec.linv_dl_f > rec.linv_dl_bound + kDominationSlack) {
            rec.violation = true;
          }
        }
      } catch (const FactorizationError&) {
        rec.breakdown = true;
        // Existence of the perturbed factor is part of the claim.
        if (rec.report.cond_3_1_ok) rec.violation = true;
      }
      out.push_back(std::move(rec));
    }
  }
  return out;
}

std::vector<ComponentwiseTrialRecord> run_componentwise_campaign(
    const EnsembleConfig& cfg) {
  cfg.validate();
  std::vector<ComponentwiseTrialRecord> out;
  const BlockSpec spec(cfg.m, cfg.n);
  const std::size_t p = spec.order();
  const double eps_min =
      componentwise_eps(cfg.m, cfg.n, kUnitRoundoff, EpsConvention::min_paper);
  const double eps_max =
      componentwise_eps(cfg.m, cfg.n, kUnitRoundoff, EpsConvention::max_safe);
  const double fp_eps =
      10.0 * (cfg.eps_convention == EpsConvention::min_paper ? eps_min : eps_max);

  for (std::size_t t = 0; t < cfg.trials; ++t) {
    Rng rng = trial_rng(cfg.seed, t);
    const auto trial = factored_trial(cfg, rng);
    const Matrix lt = factor_to_dense(trial.factor);
    const auto ctx = ComponentwiseContext::build(
        lt, scaling_candidates(lt, ScalingPurpose::componentwise));
    const Matrix envelope = matmul(abs(lt), abs(transpose(lt)));

    // Floating-point backward error of the computed factor.
    const Matrix resid = compensated_residual(trial.factor, trial.gen.s);
    std::size_t fp_violations = 0;
    double fp_ratio = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) {
        if (envelope(i, j) == 0.0) continue;
        const double ratio = std::fabs(resid(i, j)) / (fp_eps / 10.0 * envelope(i, j));
        fp_ratio = std::max(fp_ratio, ratio);
        if (std::fabs(resid(i, j)) > fp_eps * envelope(i, j)) ++fp_violations;
      }
    }

    // Symmetric pattern in [-1, 1], shared by all eps levels of the trial.
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Matrix pattern(p, p);
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        pattern(i, j) = unit(rng);
        pattern(j, i) = pattern(i, j);
      }
    }

    for (std::size_t li = 0; li < cfg.eps_levels.size(); ++li) {
      const double eps = cfg.eps_levels[li];
      ComponentwiseTrialRecord rec;
      rec.trial = t;
      rec.level_index = li;
      rec.m = cfg.m;
      rec.n = cfg.n;
      rec.seed = trial_seed(cfg.seed, t);
      rec.eps_min_paper = eps_min;
      rec.eps_max_safe = eps_max;
      rec.fp_slack_eps = fp_eps;
      rec.fp_envelope_violations = fp_violations;
      rec.fp_max_ratio = fp_ratio;
      if (fp_violations > 0) rec.violation = true;

      Matrix dk(p, p);
      rec.envelope_ok = true;
      for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
          dk(i, j) = pattern(i, j) * (eps * envelope(i, j));
          if (std::fabs(dk(i, j)) > eps * envelope(i, j)) rec.envelope_ok = false;
        }
      }
      if (!rec.envelope_ok) rec.violation = true;

      rec.report = componentwise_report(ctx, eps, "synthetic");
      if (!rec.report.cond_4_2_ok) {
        rec.skipped = true;
        out.push_back(std::move(rec));
        continue;
      }

      const Matrix k = compensated_ljlt_minus(trial.factor, dk);
      try {
        const Matrix dl = delta_factor(trial.factor, factorize_dense(k, spec));
        rec.actual_f = fro_norm(dl);
        rec.actual_2 = spectral_norm(dl);
        rec.report.actual_dl_fro = rec.actual_f;
        rec.report.actual_dl_2 = rec.actual_2;
        if (rec.actual_f > *rec.report.b_4_3 + kDominationSlack) {
          rec.violation = true;
        }
      } catch (const FactorizationError&) {
        rec.breakdown = true;
        rec.violation = true;
      }
      out.push_back(std::move(rec));
    }
  }
  return out;
}

const char* to_string(SweepKind k) {
  return k == SweepKind::column_scaling ? "column-scaling" : "w-conditioning";
}

SweepKind sweep_kind_from_string(const std::string& s) {
  if (s == "remark32" || s == "column-scaling") return SweepKind::column_scaling;
  if (s == "remark33" || s == "w-conditioning") return SweepKind::w_conditioning;
  throw Error("unknown sweep kind '" + s + "'");
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

SweepTable run_gamma_sweep(SweepKind kind, const std::vector<double>& gammas) {
  SweepTable table;
  table.kind = kind;
  const BlockSpec spec(1, 1);
  std::vector<double> lx, ly;

  for (double g : gammas) {
    if (!(g > 0.0)) throw Error("sweep gammas must be positive");
    SweepRow row;
    row.gamma = g;
    if (kind == SweepKind::column_scaling) {
      const Matrix l{{1.0 / g, 0.0}, {1.0, 1.0}};
      const auto ctx = NormwiseContext::build(
          l, scaling_candidates(l, ScalingPurpose::kappa_min));
      const DiagScaling d({1.0 / g, 1.0});
      row.kappa_l = ctx.kappa_l;
      row.kappa_ld = spectral_norm(unscale_cols(l, d)) *
                     spectral_norm(scale_rows(d, ctx.l_inv));
      row.kappa_ratio = row.kappa_l / row.kappa_ld;
      row.dk_fro = kSweepDk;
      if (normwise_condition_holds(ctx, kSweepDk)) {
        const auto b = scaled_rigorous_bound(ctx, kSweepDk);
        row.b33 = b.value;
        row.b33_label = b.label;
        row.b313 = classic_spectral_bound(ctx, kSweepDk);
      }
      if (g <= 1e-2) {
        row.claim_ok = row.kappa_ratio >= 0.5 / g && row.kappa_ratio <= 2.0 / g;
        lx.push_back(std::log(1.0 / g));
        ly.push_back(std::log(row.kappa_ratio));
      }
    } else {
      const Matrix l{{1.0, 0.0}, {g, 1.0}};
      const auto factor = GenCholFactor::from_dense(l, spec);
      const auto ctx = NormwiseContext::build(
          l, scaling_candidates(l, ScalingPurpose::kappa_min));
      const double w_inv = w_inverse_norm(build_w(factor));
      row.linv2_sq = ctx.linv_2 * ctx.linv_2;
      row.winv2_sq = w_inv * w_inv;
      row.threshold_normwise = 0.5 / row.linv2_sq;
      row.threshold_vector = 0.25 / row.winv2_sq;
      row.dk_fro = 0.5 * row.threshold_vector;
      row.b315 = vector_equation_bound(w_inv, row.dk_fro);
      row.b34 = scaled_linear_bound(ctx, row.dk_fro).value;
      if (g >= 10.0) {
        row.claim_ok = row.threshold_vector < row.threshold_normwise;
        lx.push_back(std::log(g));
        ly.push_back(std::log(w_inv));
      }
    }
    if (!row.claim_ok) ++table.violations;
    table.rows.push_back(std::move(row));
  }

  table.slope = fit_slope(lx, ly);
  if (kind == SweepKind::w_conditioning && lx.size() >= 2 &&
      !(table.slope >= 1.8 && table.slope <= 2.2)) {
    ++table.violations;
  }
  return table;
}

}  // namespace gchol
