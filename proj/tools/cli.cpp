#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gchol/bounds.hpp"
#include "gchol/densela.hpp"
#include "gchol/errors.hpp"
#include "gchol/genchol.hpp"
#include "gchol/harness.hpp"
#include "gchol/matrix.hpp"
#include "gchol/report.hpp"

namespace gchol::cli {
namespace {

struct FactorArgs {
  std::string in;
  std::string out;
};

struct BoundsArgs {
  std::string k_path;
  std::string dk_path;
  std::string out;
  bool with_actual = false;
  bool with_w_bound = false;
};

struct CampaignArgs {
  EnsembleConfig cfg;
  std::string format = "csv";
  std::string out;
  std::string eps_convention = "max-safe";
};

struct SweepArgs {
  std::string kind = "remark32";
  std::vector<double> gammas;
  std::string format = "csv";
  std::string out;
};

std::vector<double> default_gammas(SweepKind kind) {
  if (kind == SweepKind::column_scaling) return {1e-2, 1e-3, 1e-4};
  return {10.0, 100.0, 1000.0};
}

std::ifstream open_input(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open '" + path + "'");
  return is;
}

// Writes to the file when a path was given, otherwise to `out`.
void deliver(const std::string& path, const std::string& content,
             std::ostream& out) {
  if (path.empty()) {
    out << content;
  } else {
    write_file_atomic(path, content);
  }
}

std::string fmt(double x) {
  return std::isfinite(x) ? format_double(x) : (std::isnan(x) ? "nan" : "inf");
}

int cmd_factor(const FactorArgs& a, std::ostream& out, std::ostream& err) {
  SaddleFile file;
  try {
    auto is = open_input(a.in);
    file = read_saddle_dense(is);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  try {
    const GenCholFactor l = factorize_dense(file.k, file.spec);
    std::ostringstream os;
    write_matrix(os, factor_to_dense(l));
    deliver(a.out, os.str(), out);
  } catch (const NotPositiveDefinite& e) {
    err << "error: factorization breakdown at pivot " << e.pivot() << ": "
        << e.what() << '\n';
    return kBreakdown;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kOk;
}

int cmd_bounds(const BoundsArgs& a, std::ostream& out, std::ostream& err) {
  SaddleFile file;
  Matrix dk;
  try {
    auto ks = open_input(a.k_path);
    file = read_saddle_dense(ks);
    auto ds = open_input(a.dk_path);
    dk = read_matrix(ds);
    if (dk.rows() != file.k.rows() || dk.cols() != file.k.cols()) {
      throw DimensionError("perturbation order does not match K");
    }
    if (!is_symmetric(dk)) throw ParseError("perturbation is not symmetric");
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  NormwiseBoundReport report;
  try {
    const GenCholFactor l = factorize_dense(file.k, file.spec);
    NormwiseOptions opts;
    opts.with_actual = a.with_actual;
    opts.with_w_bound = a.with_w_bound;
    report = normwise_report(l, file.k, dk, opts);
  } catch (const NotPositiveDefinite& e) {
    err << "error: factorization breakdown at pivot " << e.pivot() << ": "
        << e.what() << '\n';
    return kBreakdown;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    deliver(a.out, to_json(report) + "\n", out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  if (!report.cond_3_1_ok) {
    err << "condition ||L^-1||_2^2 ||dK||_F < 1/2 does not hold\n";
    return kConditionFailed;
  }
  return kOk;
}

double min_finite(double acc, double x) {
  return std::isfinite(x) ? std::min(acc, x) : acc;
}

int cmd_verify(const CampaignArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<NormwiseTrialRecord> records;
  try {
    a.cfg.validate();
    const ReportFormat format = report_format_from_string(a.format);
    records = run_normwise_campaign(a.cfg);
    deliver(a.out, render(records, format), out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  std::size_t violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& r : records) {
    violations += r.violation ? 1 : 0;
    worst = min_finite(worst, r.worst_ratio);
  }
  err << "verify: trials=" << a.cfg.trials << " records=" << records.size()
      << " violations=" << violations << " worst_ratio=" << fmt(worst) << '\n';
  return violations == 0 ? kOk : kViolation;
}

int cmd_backward(const CampaignArgs& a, std::ostream& out,
                 std::ostream& err) {
  std::vector<ComponentwiseTrialRecord> records;
  EnsembleConfig cfg = a.cfg;
  try {
    cfg.eps_convention = eps_convention_from_string(a.eps_convention);
    cfg.validate();
    const ReportFormat format = report_format_from_string(a.format);
    records = run_componentwise_campaign(cfg);
    deliver(a.out, render(records, format), out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  std::size_t violations = 0;
  std::size_t envelope_violations = 0;
  std::size_t skipped = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& r : records) {
    violations += r.violation ? 1 : 0;
    envelope_violations += r.fp_envelope_violations;
    skipped += r.skipped ? 1 : 0;
    if (r.report.b_4_3 && r.actual_f > 0.0) {
      worst = min_finite(worst, *r.report.b_4_3 / r.actual_f);
    }
  }
  err << "backward: trials=" << cfg.trials << " records=" << records.size()
      << " skipped=" << skipped << " violations=" << violations
      << " envelope_violations=" << envelope_violations
      << " worst_ratio=" << fmt(worst) << '\n';
  return violations == 0 ? kOk : kViolation;
}

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  SweepTable table;
  try {
    const SweepKind kind = sweep_kind_from_string(a.kind);
    const ReportFormat format = report_format_from_string(a.format);
    std::vector<double> gammas = a.gammas;
    if (gammas.empty()) gammas = default_gammas(kind);
    for (double g : gammas) {
      if (!(g > 0.0) || !std::isfinite(g)) {
        throw Error("gammas must be positive and finite");
      }
    }
    table = run_gamma_sweep(kind, gammas);
    deliver(a.out, render(table, format), out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  err << "sweep: kind=" << to_string(table.kind)
      << " rows=" << table.rows.size() << " slope=" << fmt(table.slope)
      << " violations=" << table.violations << '\n';
  return table.violations == 0 ? kOk : kViolation;
}

void add_campaign_options(CLI::App* sub, CampaignArgs& a) {
  sub->add_option("--m", a.cfg.m, "order of the A block");
  sub->add_option("--n", a.cfg.n, "order of the C block");
  sub->add_option("--trials", a.cfg.trials, "number of random matrices")
      ->check(CLI::PositiveNumber);
  sub->add_option("--seed", a.cfg.seed, "base seed");
  sub->add_option("--cond-target", a.cfg.cond_target,
                  "cap for the log-uniform condition targets");
  sub->add_option("--format", a.format, "report format")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", a.out, "output file (default: standard output)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Generalized Cholesky factorization and perturbation bounds",
               "gchol"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  FactorArgs factor_args;
  auto* factor = app.add_subcommand("factor", "factor a saddle-point matrix");
  factor->add_option("in", factor_args.in, "saddle-point matrix file")
      ->required();
  factor->add_option("--out", factor_args.out,
                     "output file (default: standard output)");

  BoundsArgs bounds_args;
  auto* bounds = app.add_subcommand("bounds", "normwise bounds for one dK");
  bounds->add_option("K", bounds_args.k_path, "saddle-point matrix file")
      ->required();
  bounds->add_option("dK", bounds_args.dk_path, "perturbation matrix file")
      ->required();
  bounds->add_flag("--with-actual", bounds_args.with_actual,
                   "factorize K + dK and report the true change");
  bounds->add_flag("--with-w-bound", bounds_args.with_w_bound,
                   "build the vectorized operator (order <= 24)");
  bounds->add_option("--out", bounds_args.out,
                     "output file (default: standard output)");

  CampaignArgs verify_args;
  auto* verify = app.add_subcommand("verify", "normwise bound campaign");
  add_campaign_options(verify, verify_args);
  verify->add_option("--dk-levels", verify_args.cfg.dk_levels,
                     "targets for ||L^-1||_2^2 ||dK||_F")
      ->delimiter(',');
  verify->add_flag("--with-w-bound,!--no-w-bound",
                   verify_args.cfg.with_w_bound,
                   "include the vectorized-operator bound for order <= 24 "
                   "(default: on)");

  CampaignArgs backward_args;
  backward_args.cfg.m = 3;
  backward_args.cfg.n = 3;
  auto* backward =
      app.add_subcommand("backward", "componentwise backward-error campaign");
  add_campaign_options(backward, backward_args);
  backward->add_option("--eps-levels", backward_args.cfg.eps_levels,
                       "synthetic perturbation sizes")
      ->delimiter(',');
  backward->add_option("--eps-convention", backward_args.eps_convention,
                       "gamma constant used by the residual check")
      ->check(CLI::IsMember({"min-paper", "max-safe"}));

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "2x2 adversarial gamma sweep");
  sweep->add_option("--kind", sweep_args.kind,
                    "remark32 (column scaling) or remark33 (W conditioning)")
      ->check(CLI::IsMember({"remark32", "remark33", "column-scaling",
                             "w-conditioning"}));
  sweep->add_option("--gammas", sweep_args.gammas,
                    "gamma values (default: 1e-2,1e-3,1e-4 for remark32; "
                    "10,100,1000 for remark33)")
      ->delimiter(',');
  sweep->add_option("--format", sweep_args.format, "report format")
      ->check(CLI::IsMember({"csv", "json"}));
  sweep->add_option("--out", sweep_args.out,
                    "output file (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  if (factor->parsed()) return cmd_factor(factor_args, out, err);
  if (bounds->parsed()) return cmd_bounds(bounds_args, out, err);
  if (verify->parsed()) return cmd_verify(verify_args, out, err);
  if (backward->parsed()) return cmd_backward(backward_args, out, err);
  return cmd_sweep(sweep_args, out, err);
}

}  // namespace gchol::cli
