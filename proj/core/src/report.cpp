#include "lba/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "lba/errors.hpp"

namespace lba::harness {

namespace {

using nlohmann::json;

std::string csv_field(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? format_double(*v) : std::string();
}

std::string json_number(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? format_double(*v) : std::string("null");
}

std::string quoted(const std::string& s) { return json(s).dump(); }

std::optional<double> optional_number(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

}  // namespace

ReportFormat parse_format(std::string_view name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  throw ConfigError("unknown report format '" + std::string(name) + "' (expected csv or json)");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const SweepReport& report, std::ostream& os) {
  os << kCsvHeader << '\n';
  for (const auto& p : report.points) {
    os << report.axis_name << ',' << format_double(p.axis_value) << ',' << p.n_trials << ','
       << p.n_valid << ',' << csv_field(p.p_dec) << ',' << csv_field(p.std_error) << ','
       << csv_field(p.p_fa) << ',' << csv_field(p.lb_thm1) << ',' << csv_field(p.ub_cor1) << ','
       << csv_field(p.lb_thm3) << ',' << csv_field(p.lb_thm4) << ',' << csv_field(p.lq_cost_mean)
       << ',' << p.config_hash << '\n';
  }
}

void write_json(const SweepReport& report, std::ostream& os) {
  os << "{\n  \"schema_version\": " << kSchemaVersion << ",\n"
     << "  \"axis_name\": " << quoted(report.axis_name) << ",\n"
     << "  \"config_hash\": " << quoted(report.config_hash) << ",\n"
     << "  \"seed\": " << report.seed << ",\n"
     << "  \"x0_source\": " << quoted(report.x0_source) << ",\n"
     << "  \"points\": [";
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    const auto& p = report.points[i];
    os << (i == 0 ? "\n" : ",\n") << "    {\"axis_value\": " << format_double(p.axis_value)
       << ", \"n_trials\": " << p.n_trials << ", \"n_valid\": " << p.n_valid
       << ", \"p_dec\": " << json_number(p.p_dec) << ", \"stderr\": " << json_number(p.std_error)
       << ", \"p_fa\": " << json_number(p.p_fa) << ", \"lb_thm1\": " << json_number(p.lb_thm1)
       << ", \"ub_cor1\": " << json_number(p.ub_cor1) << ", \"lb_thm3\": " << json_number(p.lb_thm3)
       << ", \"lb_thm4\": " << json_number(p.lb_thm4)
       << ", \"lq_cost_mean\": " << json_number(p.lq_cost_mean)
       << ", \"config_hash\": " << quoted(p.config_hash) << "}";
  }
  os << (report.points.empty() ? "]\n}\n" : "\n  ]\n}\n");
}

void write_long_csv(const SweepReport& report, std::ostream& os) {
  os << "axis_name,axis_value,series,value,stderr\n";
  for (const auto& p : report.points) {
    auto row = [&](const char* series, const std::optional<double>& v,
                   const std::optional<double>& se) {
      if (!v || !std::isfinite(*v)) return;
      os << report.axis_name << ',' << format_double(p.axis_value) << ',' << series << ','
         << format_double(*v) << ',' << csv_field(se) << '\n';
    };
    row("p_dec", p.p_dec, p.std_error);
    row("p_fa", p.p_fa, p.std_error);
    row("lb_thm1", p.lb_thm1, std::nullopt);
    row("ub_cor1", p.ub_cor1, std::nullopt);
    row("lb_thm3", p.lb_thm3, std::nullopt);
    row("lb_thm4", p.lb_thm4, std::nullopt);
    row("lq_cost_mean", p.lq_cost_mean, std::nullopt);
  }
}

void emit_report(const SweepReport& report, ReportFormat format, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  if (format == ReportFormat::csv) {
    write_csv(report, out);
  } else {
    write_json(report, out);
  }
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

SweepReport parse_json_report(const std::string& text) {
  SweepReport r;
  json j;
  try {
    j = json::parse(text);
    r.axis_name = j.at("axis_name").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.x0_source = j.value("x0_source", std::string());
    for (const auto& pj : j.at("points")) {
      SweepPoint p;
      p.axis_value = pj.at("axis_value").get<double>();
      p.n_trials = pj.at("n_trials").get<std::size_t>();
      p.n_valid = pj.at("n_valid").get<std::size_t>();
      p.p_dec = optional_number(pj, "p_dec");
      p.std_error = optional_number(pj, "stderr");
      p.p_fa = optional_number(pj, "p_fa");
      p.lb_thm1 = optional_number(pj, "lb_thm1");
      p.ub_cor1 = optional_number(pj, "ub_cor1");
      p.lb_thm3 = optional_number(pj, "lb_thm3");
      p.lb_thm4 = optional_number(pj, "lb_thm4");
      p.lq_cost_mean = optional_number(pj, "lq_cost_mean");
      p.config_hash = pj.at("config_hash").get<std::string>();
      r.points.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    throw Error(std::string("malformed JSON report: ") + e.what());
  }
  return r;
}

void write_trajectory_csv(const TrialOutcome& outcome, std::ostream& os) {
  if (!outcome.trajectory) throw ContractViolation("trial was run without a recorded trajectory");
  const Trajectory& t = *outcome.trajectory;
  const Eigen::Index n = t.dim();
  auto names = [&](const char* base) {
    std::string s;
    for (Eigen::Index i = 0; i < n; ++i) {
      s += ',';
      s += base;
      if (n > 1) s += std::to_string(i);
    }
    return s;
  };
  os << 'k' << names("x") << names("u") << names("y") << names("w") << ",hijacked\n";
  auto cells = [&](const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << format_double(v(i));
  };
  for (std::size_t k = 0; k < t.size(); ++k) {
    os << k;
    cells(t.states()[k]);
    cells(t.controls()[k]);
    cells(t.observations()[k]);
    cells(t.disturbances()[k]);
    os << ',' << (t.hijacked()[k] ? 1 : 0) << '\n';
  }
}

}  // namespace lba::harness
