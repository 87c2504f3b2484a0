// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances are fixed constants below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "gchol/bounds.hpp"
#include "gchol/densela.hpp"
#include "gchol/genchol.hpp"
#include "gchol/harness.hpp"
#include "gchol/matrix.hpp"
#include "gchol/oracle.hpp"

using namespace gchol;

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kIdentityRelTol = 1e-12;    // AC3, AC9 factor identities
constexpr double kCapRelTol = 1e-12;         // AC4 cap slack
constexpr double kNearCapRatio = 2.2;        // AC4 second part
constexpr double kNearCapLevel = 0.49;       // AC4 dk level
constexpr double kResidualFactor = 50.0;     // AC1
constexpr double kAc1Seconds = 5.0;
constexpr double kAc2Seconds = 60.0;
constexpr double kKappaGapFactor = 2.0;      // AC5 within factor 2 of 1/g
constexpr double kBoundGapFactor = 50.0;     // AC5 b33 <= b313 / 50
constexpr double kSlopeLo = 1.8, kSlopeHi = 2.2;  // AC6
constexpr double kThresholdGap = 10.0;       // AC6
constexpr double kLhsRelTol = 1e-12;         // AC7 rounding allowance
constexpr double kEnvelopeSlack = 10.0;      // AC8
constexpr double kUpRelTol = 1e-12;          // AC10
constexpr double kMapTol = 1e-13;            // AC11 defining map
constexpr double kLinearizationTol = 1e-3;   // AC11 first order
constexpr double kLinearizationDk = 1e-10;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(const char* id, const char* title, const Outcome& o) {
  std::cout << id << ' ' << (o.pass ? "PASS" : "FAIL") << "  " << title
            << ": " << o.detail << std::endl;
  if (!o.pass) ++failures;
}

void run_criterion(const char* id, const char* title,
                   const std::function<Outcome()>& f) {
  Outcome o;
  try {
    o = f();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  report(id, title, o);
}

// Shared normwise ensemble for AC2, AC3, AC4 (first part) and AC7. Every
// configuration keeps p = m + n <= 12 so the vector-equation bound is on.
struct NormwiseRun {
  std::vector<NormwiseTrialRecord> records;
  double seconds = 0.0;
};

NormwiseRun& normwise_run() {
  static NormwiseRun run = [] {
    struct Cfg {
      std::size_t m, n;
      double cond;
    };
    const std::vector<Cfg> cfgs{
        {1, 1, 1e2}, {3, 2, 1e4}, {4, 3, 1e4}, {6, 4, 1e6}, {6, 6, 1e6}};
    NormwiseRun r;
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
      EnsembleConfig cfg;
      cfg.m = cfgs[i].m;
      cfg.n = cfgs[i].n;
      cfg.cond_target = cfgs[i].cond;
      cfg.trials = 200;
      cfg.seed = 20140823 + i;
      cfg.with_w_bound = true;
      auto recs = run_normwise_campaign(cfg);
      r.records.insert(r.records.end(), recs.begin(), recs.end());
    }
    r.seconds = seconds_since(t0);
    return r;
  }();
  return run;
}

Outcome ac1() {
  const auto t0 = Clock::now();
  Rng rng(101);
  double worst = 0.0;
  std::size_t bad = 0;
  for (int t = 0; t < 100; ++t) {
    std::uniform_int_distribution<std::size_t> md(1, 20);
    const std::size_t m = md(rng);
    std::uniform_int_distribution<std::size_t> nd(1, m);
    const std::size_t n = nd(rng);
    const GeneratedSaddle g = gen_saddle(m, n, 1e6, rng);
    const Matrix k = assemble_k(g.s);
    const GenCholFactor l = factorize(g.s);
    const double limit =
        kResidualFactor * double(m + n) * kUnitRoundoff * fro_norm(k);
    const double ratio = fro_norm(subtract(reconstruct(l), k)) / limit;
    worst = std::max(worst, ratio);
    bad += ratio > 1.0 ? 1 : 0;
  }
  const double secs = seconds_since(t0);
  return {bad == 0 && secs < kAc1Seconds,
          "100 instances, worst residual/limit=" + num(worst) +
              ", failures=" + std::to_string(bad) + ", " + num(secs) + " s"};
}

Outcome ac2() {
  const auto& run = normwise_run();
  std::size_t violations = 0, w_bounds = 0, refined = 0, classic = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& r : run.records) {
    violations += r.violation ? 1 : 0;
    w_bounds += r.report.b_3_15 ? 1 : 0;
    refined += r.report.b_3_17 ? 1 : 0;
    classic += r.report.b_3_12 ? 1 : 0;
    if (std::isfinite(r.worst_ratio)) worst = std::min(worst, r.worst_ratio);
  }
  return {violations == 0 && run.records.size() == 4000 &&
              run.seconds < kAc2Seconds,
          std::to_string(run.records.size()) + " records, violations=" +
              std::to_string(violations) + ", min bound/actual=" +
              num(worst) + ", with vector-equation bound=" +
              std::to_string(w_bounds) + ", refined=" +
              std::to_string(refined) + ", classic=" +
              std::to_string(classic) + ", " + num(run.seconds) + " s"};
}

Outcome ac3() {
  std::size_t bad = 0, checked = 0;
  double worst = 0.0;
  for (const auto& r : normwise_run().records) {
    if (!r.report.b_3_4) continue;
    ++checked;
    const double rel =
        std::abs(*r.report.b_3_4 / r.report.b_3_11_coeff - (2 + kSqrt2)) /
        (2 + kSqrt2);
    worst = std::max(worst, rel);
    bad += rel > kIdentityRelTol ? 1 : 0;
  }
  return {bad == 0 && checked > 0,
          std::to_string(checked) + " trials, max relative deviation=" +
              num(worst)};
}

Outcome ac4() {
  std::size_t bad = 0, checked = 0;
  double max_ratio = 0.0;
  auto check = [&](const NormwiseTrialRecord& r) {
    if (!r.report.b_3_14 || !r.report.b_3_13) return;
    ++checked;
    const double ratio = *r.report.b_3_14 / *r.report.b_3_13;
    bad += ratio > (1 + kSqrt2) * (1 + kCapRelTol) ? 1 : 0;
    if (r.dk_level == kNearCapLevel) max_ratio = std::max(max_ratio, ratio);
  };
  for (const auto& r : normwise_run().records) check(r);

  EnsembleConfig cfg;
  cfg.trials = 100;
  cfg.dk_levels = {kNearCapLevel};
  std::size_t near_violations = 0;
  bool finite = true;
  for (const auto& r : run_normwise_campaign(cfg)) {
    check(r);
    near_violations += r.violation ? 1 : 0;
    finite = finite && r.report.b_3_3 && std::isfinite(*r.report.b_3_3);
  }
  const bool cap_ok = bad == 0;
  const bool near_ok = max_ratio > kNearCapRatio;
  return {cap_ok && near_ok && near_violations == 0 && finite,
          "cap exceeded in " + std::to_string(bad) + "/" +
              std::to_string(checked) + " trials; max ratio at dk level " +
              num(kNearCapLevel) + " = " + num(max_ratio) + " (required > " +
              num(kNearCapRatio) + "); near-boundary violations=" +
              std::to_string(near_violations) +
              (finite ? ", bounds finite" : ", NON-FINITE bound")};
}

Outcome ac5() {
  const std::vector<double> gammas{1e-2, 1e-3, 1e-4};
  const SweepTable t = run_gamma_sweep(SweepKind::column_scaling, gammas);
  bool ok = t.rows.size() == gammas.size();
  std::string detail = "kappa ratio * gamma:";
  for (const auto& r : t.rows) {
    const double scaled = r.kappa_ratio * r.gamma;
    detail += " " + num(scaled);
    ok = ok && scaled >= 1.0 / kKappaGapFactor && scaled <= kKappaGapFactor;
  }
  const SweepRow& last = t.rows.back();
  const bool gap = last.dk_fro == 1e-8 &&
                   last.b33_label == "col-equilibrate-L" &&
                   last.b33 * kBoundGapFactor <= last.b313;
  return {ok && gap, detail + "; at gamma=1e-4 b313/b33=" +
                         num(last.b313 / last.b33) + " (label " +
                         last.b33_label + ")"};
}

Outcome ac6() {
  const SweepTable t =
      run_gamma_sweep(SweepKind::w_conditioning, {10.0, 100.0, 1000.0});
  std::vector<double> lg, lw2;
  for (const auto& r : t.rows) {
    lg.push_back(std::log(r.gamma));
    lw2.push_back(std::log(r.winv2_sq));
  }
  const double slope2 = fit_slope(lg, lw2);
  const SweepRow& mid = t.rows[1];
  const double gap = mid.threshold_normwise / mid.threshold_vector;
  const bool ok = t.slope >= kSlopeLo && t.slope <= kSlopeHi &&
                  slope2 >= 2 * kSlopeLo && slope2 <= 2 * kSlopeHi &&
                  gap >= kThresholdGap;
  return {ok, "slope of log||W^-1|| = " + num(t.slope) +
                  ", squared slope = " + num(slope2) +
                  ", threshold gap at gamma=100 = " + num(gap)};
}

Outcome ac7() {
  std::size_t bad = 0, checked = 0;
  for (const auto& r : normwise_run().records) {
    // refined_lhs_min is the minimum over every scaling candidate.
    ++checked;
    const double rhs = r.report.linv_2 * r.report.linv_2 * r.report.dk_fro;
    bad += r.refined_lhs_min < rhs * (1 - kLhsRelTol) ? 1 : 0;
  }
  return {bad == 0, std::to_string(checked) +
                        " trials x all candidates, exceptions=" +
                        std::to_string(bad)};
}

Outcome ac8() {
  Rng rng(108);
  std::size_t violations = 0, entries = 0;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::uniform_int_distribution<std::size_t> md(1, 10);
    const std::size_t m = md(rng);
    std::uniform_int_distribution<std::size_t> nd(1, m);
    const std::size_t n = nd(rng);
    const GeneratedSaddle g = gen_saddle(m, n, 1e6, rng);
    const GenCholFactor l = factorize(g.s);
    const Matrix res = compensated_residual(l, g.s);
    const Matrix ld = abs(factor_to_dense(l));
    const Matrix env = matmul(ld, transpose(ld));
    const double eps = gamma_k(3 * std::max(m, n) + 1);
    for (std::size_t i = 0; i < m + n; ++i) {
      for (std::size_t j = 0; j < m + n; ++j) {
        if (env(i, j) == 0.0) continue;
        ++entries;
        const double ratio = std::abs(res(i, j)) / (eps * env(i, j));
        worst = std::max(worst, ratio);
        violations += ratio > kEnvelopeSlack ? 1 : 0;
      }
    }
  }
  return {violations == 0, std::to_string(entries) +
                               " entries, max |dK|/(eps env)=" + num(worst) +
                               ", violations=" + std::to_string(violations)};
}

Outcome ac9() {
  EnsembleConfig cfg;
  cfg.m = 3;
  cfg.n = 3;
  cfg.trials = 200;
  cfg.eps_levels = {1e-6};
  const auto recs = run_componentwise_campaign(cfg);
  std::size_t violations = 0, skipped = 0, identity_bad = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& r : recs) {
    violations += r.violation ? 1 : 0;
    if (r.skipped) {
      ++skipped;
      continue;
    }
    const double rel =
        std::abs(*r.report.b_4_4 / r.report.b_4_9_coeff - (2 + kSqrt2)) /
        (2 + kSqrt2);
    identity_bad += rel > kIdentityRelTol ? 1 : 0;
    if (r.actual_f > 0) worst = std::min(worst, *r.report.b_4_3 / r.actual_f);
  }
  const bool ok = recs.size() == 200 && violations == 0 &&
                  identity_bad == 0 && skipped < recs.size();
  return {ok, std::to_string(recs.size()) + " trials, skipped=" +
                  std::to_string(skipped) + ", violations=" +
                  std::to_string(violations) + ", min bound/actual=" +
                  num(worst) + ", factor-identity failures=" +
                  std::to_string(identity_bad)};
}

Outcome ac10() {
  Rng rng(110);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.1, 10.0);
  std::size_t bad22 = 0, bad23 = 0, bad24 = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t p = 1 + t % 10;
    Matrix a(p, p), s(p, p);
    std::vector<double> d(p);
    for (std::size_t i = 0; i < p; ++i) {
      d[i] = pos(rng);
      for (std::size_t j = 0; j < p; ++j) a(i, j) = u(rng);
      for (std::size_t j = 0; j <= i; ++j) s(i, j) = s(j, i) = u(rng);
    }
    bad22 += fro_norm(up_operator(a)) > fro_norm(a) * (1 + kUpRelTol);
    bad23 += fro_norm(up_operator(s)) >
             fro_norm(s) / kSqrt2 * (1 + kUpRelTol);
    const DiagScaling dd(d);
    bad24 += !(up_operator(scale_cols(a, dd)) ==
               scale_cols(up_operator(a), dd));
  }
  return {bad22 + bad23 + bad24 == 0,
          "1000 matrices each; failures: norm bound " +
              std::to_string(bad22) + ", symmetric bound " +
              std::to_string(bad23) + ", scaling commutation " +
              std::to_string(bad24)};
}

Outcome ac11() {
  Rng rng(111);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst_map = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t m = 1 + t % 5, n = 1 + t % m;
    const GeneratedSaddle g = gen_saddle(m, n, 1e4, rng);
    const GenCholFactor l = factorize(g.s);
    const Matrix ld = factor_to_dense(l);
    const std::size_t p = m + n;
    Matrix x(p, p);
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j <= i; ++j) x(i, j) = u(rng);
    }
    const WOperator w = build_w(l);
    const HalfVec hx = uvec_lower(x);
    const Matrix t1 = matmul(times_signature(x, l.spec()), transpose(ld));
    const HalfVec rhs = duvec(add(t1, transpose(t1)));
    const double scale = fro_norm(ld) * fro_norm(x);
    for (std::size_t i = 0; i < rhs.values.size(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < hx.values.size(); ++j) {
        s += w.entries(i, j) * hx.values[j];
      }
      worst_map = std::max(worst_map, std::abs(s - rhs.values[i]) / scale);
    }
  }

  double worst_lin = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t m = 1 + t % 5, n = 1 + t % m;
    const GeneratedSaddle g = gen_saddle(m, n, 1e4, rng);
    const GenCholFactor l = factorize(g.s);
    const Matrix dk = gen_sym_perturbation(m + n, kLinearizationDk, rng);
    const Matrix actual = actual_delta_l(g.s, dk);
    const Matrix predicted = unuvec(w_solve(build_w(l), duvec(dk)));
    worst_lin = std::max(
        worst_lin, fro_norm(subtract(predicted, actual)) / fro_norm(actual));
  }
  return {worst_map <= kMapTol && worst_lin <= kLinearizationTol,
          "defining map max scaled error=" + num(worst_map) +
              ", first-order max relative gap=" + num(worst_lin)};
}

Outcome ac12() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path();
  const fs::path a = dir / "gchol_acceptance_a.csv";
  const fs::path b = dir / "gchol_acceptance_b.csv";
  auto invoke = [](const fs::path& out) {
    const std::string path = out.string();
    const char* argv[] = {"gchol", "verify", "--m", "4", "--n", "3",
                          "--trials", "50", "--seed", "7", "--out",
                          path.c_str()};
    std::ostringstream so, se;
    return cli::run(12, argv, so, se);
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
  };
  const int ca = invoke(a);
  const int cb = invoke(b);
  const std::string sa = slurp(a), sb = slurp(b);
  fs::remove(a);
  fs::remove(b);
  return {ca == 0 && cb == 0 && !sa.empty() && sa == sb,
          "exit codes " + std::to_string(ca) + "/" + std::to_string(cb) +
              ", " + std::to_string(sa.size()) + " bytes, identical=" +
              (sa == sb ? "yes" : "no")};
}

}  // namespace

int main() {
  run_criterion("AC1", "factorization residual", ac1);
  run_criterion("AC2", "normwise bound domination", ac2);
  run_criterion("AC3", "linear/first-order factor 2+sqrt2", ac3);
  run_criterion("AC4", "unscaled/classic ratio cap", ac4);
  run_criterion("AC5", "column-scaling gap", ac5);
  run_criterion("AC6", "W conditioning growth", ac6);
  run_criterion("AC7", "refined hypothesis strength", ac7);
  run_criterion("AC8", "componentwise backward error", ac8);
  run_criterion("AC9", "componentwise bound domination", ac9);
  run_criterion("AC10", "up operator identities", ac10);
  run_criterion("AC11", "oracle consistency", ac11);
  run_criterion("AC12", "verify determinism", ac12);
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) +
                                                 " criterion(s) FAILED")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
