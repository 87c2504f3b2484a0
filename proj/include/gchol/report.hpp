#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gchol/bounds.hpp"
#include "gchol/harness.hpp"

namespace gchol {

/// Builder for a one-level JSON object. Numbers are written with 17
/// significant digits; non-finite numbers and empty optionals become null.
class FlatJson {
 public:
  FlatJson& add(std::string_view key, double v);
  FlatJson& add(std::string_view key, const std::optional<double>& v);
  FlatJson& add(std::string_view key, bool v);
  FlatJson& add(std::string_view key, const std::optional<bool>& v);
  FlatJson& add(std::string_view key, std::string_view v);
  FlatJson& add(std::string_view key, const char* v) {
    return add(key, std::string_view(v));
  }
  FlatJson& add_count(std::string_view key, unsigned long long v);
  FlatJson& add_null(std::string_view key);

  std::string str() const { return "{" + body_ + "}"; }

 private:
  void key(std::string_view k);
  std::string body_;
};

std::string json_escape(std::string_view s);

std::string to_json(const NormwiseBoundReport& r);
std::string to_json(const ComponentwiseBoundReport& r);

enum class ReportFormat { csv, json };

ReportFormat report_format_from_string(const std::string& s);

/// Normwise CSV columns, in order:
/// trial, m, n, seed, dk_fro, linv2, cond31, b33, b33_label, b34, b311,
/// cond312, b312, b313, b314, cond316, b315, cond318, b317, b317_label,
/// actual_f, actual_2, worst_ratio, violation
extern const std::vector<std::string> kNormwiseCsvColumns;

/// Componentwise CSV columns, in order:
/// trial, m, n, seed, eps, eps_min_paper, eps_max_safe, cond42, cond_bs_L,
/// cond_bs_LinvT, b43, b43_label, b44, b49, actual_f, actual_2,
/// envelope_ok, fp_envelope_violations, fp_max_ratio, skipped, violation
extern const std::vector<std::string> kComponentwiseCsvColumns;

std::string render(const std::vector<NormwiseTrialRecord>& records,
                   ReportFormat format);
std::string render(const std::vector<ComponentwiseTrialRecord>& records,
                   ReportFormat format);
std::string render(const SweepTable& table, ReportFormat format);

/// Writes `content` to `path` via a temporary file and rename. Throws Error
/// on I/O failure.
void write_file_atomic(const std::string& path, const std::string& content);

/// Renders and writes records; throws Error when `records` is empty.
void emit_report(const std::vector<NormwiseTrialRecord>& records,
                 ReportFormat format, const std::string& path);
void emit_report(const std::vector<ComponentwiseTrialRecord>& records,
                 ReportFormat format, const std::string& path);

}  // namespace gchol
