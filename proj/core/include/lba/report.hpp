#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>

#include "lba/experiment.hpp"

namespace lba::harness {

enum class ReportFormat { csv, json };

ReportFormat parse_format(std::string_view name);

/// Exact CSV header of sweep reports.
inline constexpr std::string_view kCsvHeader =
    "axis_name,axis_value,n_trials,n_valid,p_dec,stderr,p_fa,lb_thm1,ub_cor1,lb_thm3,lb_thm4,"
    "lq_cost_mean,config_hash";

/// %.17g, the shortest form that round-trips every double.
std::string format_double(double v);

void write_csv(const SweepReport& report, std::ostream& os);
void write_json(const SweepReport& report, std::ostream& os);
/// Long format for plotting: axis_name,axis_value,series,value,stderr.
void write_long_csv(const SweepReport& report, std::ostream& os);

/// Writes to `path`; throws Error when the file cannot be opened.
void emit_report(const SweepReport& report, ReportFormat format, const std::filesystem::path& path);

/// Reads back a JSON report written by write_json.
SweepReport parse_json_report(const std::string& text);

/// Per-step CSV dump of a recorded trial.
void write_trajectory_csv(const TrialOutcome& outcome, std::ostream& os);

}  // namespace lba::harness
