#include "gchol/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gchol/errors.hpp"
#include "gchol/matrix.hpp"

namespace gchol {

std::string json_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

void FlatJson::key(std::string_view k) {
  if (!body_.empty()) body_ += ',';
  body_ += '"';
  body_ += json_escape(k);
  body_ += "\":";
}

FlatJson& FlatJson::add(std::string_view k, double v) {
  key(k);
  body_ += std::isfinite(v) ? format_double(v) : "null";
  return *this;
}

FlatJson& FlatJson::add(std::string_view k, const std::optional<double>& v) {
  return v ? add(k, *v) : add_null(k);
}

FlatJson& FlatJson::add(std::string_view k, bool v) {
  key(k);
  body_ += v ? "true" : "false";
  return *this;
}

FlatJson& FlatJson::add(std::string_view k, const std::optional<bool>& v) {
  return v ? add(k, *v) : add_null(k);
}

FlatJson& FlatJson::add(std::string_view k, std::string_view v) {
  key(k);
  body_ += '"';
  body_ += json_escape(v);
  body_ += '"';
  return *this;
}

FlatJson& FlatJson::add_count(std::string_view k, unsigned long long v) {
  key(k);
  body_ += std::to_string(v);
  return *this;
}

FlatJson& FlatJson::add_null(std::string_view k) {
  key(k);
  body_ += "null";
  return *this;
}

namespace {

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

void fill_normwise(FlatJson& j, const NormwiseBoundReport& r) {
  j.add("dk_fro", r.dk_fro)
      .add("linv_2", r.linv_2)
      .add("cond_3_1_ok", r.cond_3_1_ok)
      .add("cond_3_12_ok", r.cond_3_12_ok)
      .add("cond_3_16_ok", r.cond_3_16_ok)
      .add("cond_3_18_ok", r.cond_3_18_ok)
      .add("b_3_3", r.b_3_3)
      .add("b_3_3_label", r.b_3_3_label)
      .add("b_3_4", r.b_3_4)
      .add("b_3_4_label", r.b_3_4_label)
      .add("b_3_11_coeff", r.b_3_11_coeff)
      .add("b_3_12", r.b_3_12)
      .add("b_3_13", r.b_3_13)
      .add("b_3_14", r.b_3_14)
      .add("b_3_15", r.b_3_15)
      .add("b_3_17", r.b_3_17)
      .add("b_3_17_label", r.b_3_17_label)
      .add("b_3_17_excluded", join(r.b_3_17_excluded, ';'))
      .add("actual_dl_fro", r.actual_dl_fro)
      .add("actual_dl_2", r.actual_dl_2)
      .add("near_boundary", r.near_boundary);
}

void fill_componentwise(FlatJson& j, const ComponentwiseBoundReport& r) {
  j.add("eps", r.eps)
      .add("eps_convention", r.eps_convention)
      .add("cond_4_2_ok", r.cond_4_2_ok)
      .add("b_4_3", r.b_4_3)
      .add("b_4_3_label", r.b_4_3_label)
      .add("b_4_4", r.b_4_4)
      .add("b_4_9_coeff", r.b_4_9_coeff)
      .add("cond_bs_L", r.cond_bs_L)
      .add("cond_bs_LinvT", r.cond_bs_LinvT)
      .add("actual_dl_fro", r.actual_dl_fro)
      .add("actual_dl_2", r.actual_dl_2)
      .add("near_boundary", r.near_boundary);
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format_double(v);
}
std::string num(const std::optional<double>& v) { return v ? num(*v) : ""; }
std::string flag(bool v) { return v ? "true" : "false"; }
std::string flag(const std::optional<bool>& v) { return v ? flag(*v) : ""; }

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) {
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    out_ << join(cells, ',') << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

std::string json_array(const std::vector<std::string>& objects) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < objects.size(); ++i) {
    out += objects[i];
    out += i + 1 < objects.size() ? ",\n" : "\n";
  }
  out += "]\n";
  return out;
}

}  // namespace

std::string to_json(const NormwiseBoundReport& r) {
  FlatJson j;
  fill_normwise(j, r);
  return j.str();
}

std::string to_json(const ComponentwiseBoundReport& r) {
  FlatJson j;
  fill_componentwise(j, r);
  return j.str();
}

ReportFormat report_format_from_string(const std::string& s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  throw Error("unknown report format '" + s + "'");
}

const std::vector<std::string> kNormwiseCsvColumns = {
    "trial",   "m",          "n",          "seed",     "dk_fro", "linv2",
    "cond31",  "b33",        "b33_label",  "b34",      "b311",   "cond312",
    "b312",    "b313",       "b314",       "cond316",  "b315",   "cond318",
    "b317",    "b317_label", "actual_f",   "actual_2", "worst_ratio",
    "violation"};

const std::vector<std::string> kComponentwiseCsvColumns = {
    "trial",         "m",           "n",
    "seed",          "eps",         "eps_min_paper",
    "eps_max_safe",  "cond42",      "cond_bs_L",
    "cond_bs_LinvT", "b43",         "b43_label",
    "b44",           "b49",         "actual_f",
    "actual_2",      "envelope_ok", "fp_envelope_violations",
    "fp_max_ratio",  "skipped",     "violation"};

std::string render(const std::vector<NormwiseTrialRecord>& records,
                   ReportFormat format) {
  if (format == ReportFormat::csv) {
    CsvWriter csv(kNormwiseCsvColumns);
    for (const auto& rec : records) {
      const auto& r = rec.report;
      csv.row({std::to_string(rec.trial), std::to_string(rec.m),
               std::to_string(rec.n), std::to_string(rec.seed), num(r.dk_fro),
               num(r.linv_2), flag(r.cond_3_1_ok), num(r.b_3_3), r.b_3_3_label,
               num(r.b_3_4), num(r.b_3_11_coeff), flag(r.cond_3_12_ok),
               num(r.b_3_12), num(r.b_3_13), num(r.b_3_14),
               flag(r.cond_3_16_ok), num(r.b_3_15), flag(r.cond_3_18_ok),
               num(r.b_3_17), r.b_3_17_label, num(rec.actual_f),
               num(rec.actual_2), num(rec.worst_ratio), flag(rec.violation)});
    }
    return csv.str();
  }
  std::vector<std::string> objs;
  for (const auto& rec : records) {
    FlatJson j;
    j.add_count("trial", rec.trial)
        .add_count("m", rec.m)
        .add_count("n", rec.n)
        .add_count("seed", rec.seed)
        .add("dk_level", rec.dk_level)
        .add("cond_a", rec.params.cond_a)
        .add("cond_s", rec.params.cond_s)
        .add_count("c_deficiency", rec.params.c_deficiency);
    fill_normwise(j, rec.report);
    j.add("actual_f", rec.actual_f)
        .add("actual_2", rec.actual_2)
        .add("linv_dl_f", rec.linv_dl_f)
        .add("linv_dl_bound", rec.linv_dl_bound)
        .add("refined_lhs_min", rec.refined_lhs_min)
        .add("breakdown", rec.breakdown)
        .add("worst_ratio", rec.worst_ratio)
        .add("violation", rec.violation);
    objs.push_back(j.str());
  }
  return json_array(objs);
}

std::string render(const std::vector<ComponentwiseTrialRecord>& records,
                   ReportFormat format) {
  if (format == ReportFormat::csv) {
    CsvWriter csv(kComponentwiseCsvColumns);
    for (const auto& rec : records) {
      const auto& r = rec.report;
      csv.row({std::to_string(rec.trial), std::to_string(rec.m),
               std::to_string(rec.n), std::to_string(rec.seed), num(r.eps),
               num(rec.eps_min_paper), num(rec.eps_max_safe),
               flag(r.cond_4_2_ok), num(r.cond_bs_L), num(r.cond_bs_LinvT),
               num(r.b_4_3), r.b_4_3_label, num(r.b_4_4), num(r.b_4_9_coeff),
               num(rec.actual_f), num(rec.actual_2), flag(rec.envelope_ok),
               std::to_string(rec.fp_envelope_violations),
               num(rec.fp_max_ratio), flag(rec.skipped), flag(rec.violation)});
    }
    return csv.str();
  }
  std::vector<std::string> objs;
  for (const auto& rec : records) {
    FlatJson j;
    j.add_count("trial", rec.trial)
        .add_count("m", rec.m)
        .add_count("n", rec.n)
        .add_count("seed", rec.seed);
    fill_componentwise(j, rec.report);
    j.add("eps_min_paper", rec.eps_min_paper)
        .add("eps_max_safe", rec.eps_max_safe)
        .add("envelope_ok", rec.envelope_ok)
        .add("skipped", rec.skipped)
        .add("breakdown", rec.breakdown)
        .add("actual_f", rec.actual_f)
        .add("actual_2", rec.actual_2)
        .add("fp_slack_eps", rec.fp_slack_eps)
        .add_count("fp_envelope_violations", rec.fp_envelope_violations)
        .add("fp_max_ratio", rec.fp_max_ratio)
        .add("violation", rec.violation);
    objs.push_back(j.str());
  }
  return json_array(objs);
}

std::string render(const SweepTable& table, ReportFormat format) {
  const bool col = table.kind == SweepKind::column_scaling;
  const std::vector<std::string> header =
      col ? std::vector<std::string>{"gamma", "kappa_l", "kappa_ld",
                                     "kappa_ratio", "dk_fro", "b33",
                                     "b33_label", "b313", "claim_ok"}
          : std::vector<std::string>{"gamma", "linv2_sq", "winv2_sq",
                                     "threshold_normwise", "threshold_vector",
                                     "dk_fro", "b315", "b34", "claim_ok"};
  if (format == ReportFormat::csv) {
    CsvWriter csv(header);
    for (const auto& r : table.rows) {
      if (col) {
        csv.row({num(r.gamma), num(r.kappa_l), num(r.kappa_ld),
                 num(r.kappa_ratio), num(r.dk_fro), num(r.b33), r.b33_label,
                 num(r.b313), flag(r.claim_ok)});
      } else {
        csv.row({num(r.gamma), num(r.linv2_sq), num(r.winv2_sq),
                 num(r.threshold_normwise), num(r.threshold_vector),
                 num(r.dk_fro), num(r.b315), num(r.b34), flag(r.claim_ok)});
      }
    }
    return csv.str();
  }
  std::vector<std::string> objs;
  for (const auto& r : table.rows) {
    FlatJson j;
    j.add("kind", to_string(table.kind)).add("gamma", r.gamma);
    if (col) {
      j.add("kappa_l", r.kappa_l)
          .add("kappa_ld", r.kappa_ld)
          .add("kappa_ratio", r.kappa_ratio)
          .add("dk_fro", r.dk_fro)
          .add("b33", r.b33)
          .add("b33_label", r.b33_label)
          .add("b313", r.b313);
    } else {
      j.add("linv2_sq", r.linv2_sq)
          .add("winv2_sq", r.winv2_sq)
          .add("threshold_normwise", r.threshold_normwise)
          .add("threshold_vector", r.threshold_vector)
          .add("dk_fro", r.dk_fro)
          .add("b315", r.b315)
          .add("b34", r.b34);
    }
    j.add("claim_ok", r.claim_ok);
    objs.push_back(j.str());
  }
  return json_array(objs);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open '" + tmp.string() + "' for writing");
    os << content;
    os.flush();
    if (!os) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot rename temporary file onto '" + path + "'");
  }
}

void emit_report(const std::vector<NormwiseTrialRecord>& records,
                 ReportFormat format, const std::string& path) {
  if (records.empty()) throw Error("emit_report: no records");
  write_file_atomic(path, render(records, format));
}

void emit_report(const std::vector<ComponentwiseTrialRecord>& records,
                 ReportFormat format, const std::string& path) {
  if (records.empty()) throw Error("emit_report: no records");
  write_file_atomic(path, render(records, format));
}

}  // namespace gchol
