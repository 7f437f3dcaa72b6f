// lba: command-line front end for trials, sweeps and bound tables.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "lba/config.hpp"
#include "lba/errors.hpp"
#include "lba/experiment.hpp"
#include "lba/report.hpp"

namespace {

using namespace lba::harness;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> threads;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "Experiment config file")->required();
  cmd->add_option("--seed", o.seed, "Base seed (overrides sweep.seed)");
  cmd->add_option("--trials", o.trials, "Trials per grid point (overrides sweep.trials)");
  cmd->add_option("--threads", o.threads, "Worker threads (overrides sweep.threads)");
  cmd->add_option("--out", o.out, "Output path (default: stdout)");
  cmd->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
}

KeyValueConfig load_config(const CommonOptions& o) {
  KeyValueConfig kv = KeyValueConfig::load(o.config);
  if (o.seed) kv.set("sweep.seed", std::to_string(*o.seed));
  if (o.trials) kv.set("sweep.trials", std::to_string(*o.trials));
  if (o.threads) kv.set("sweep.threads", std::to_string(*o.threads));
  return kv;
}

template <typename Writer>
void write_out(const std::string& path, Writer&& writer) {
  if (path.empty()) {
    writer(std::cout);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw lba::Error("cannot open '" + path + "' for writing");
  writer(f);
  if (!f) throw lba::Error("failed writing '" + path + "'");
}

void write_report(const SweepReport& report, const CommonOptions& o) {
  const ReportFormat fmt = parse_format(o.format);
  write_out(o.out, [&](std::ostream& os) {
    if (fmt == ReportFormat::csv) {
      write_csv(report, os);
    } else {
      write_json(report, os);
    }
  });
}

void print_trial_summary(const TrialOutcome& t, std::ostream& os) {
  os << "trial " << t.index << " seed " << t.seed << (t.valid ? "" : " INVALID: " + t.diagnostic)
     << "\n  hijacked " << t.hijacked << " alarm " << t.alarm << " deceived " << t.deceived
     << "\n  statistic " << format_double(t.statistic);
  if (t.estimate) {
    std::ostringstream est;
    est << t.estimate->format(Eigen::IOFormat(Eigen::FullPrecision, Eigen::DontAlignCols, " ", "; "));
    os << "\n  estimate " << est.str();
  }
  if (t.diverged_at) os << "\n  true plant diverged at step " << *t.diverged_at;
  if (t.fictitious_diverged) os << "\n  fictitious loop diverged";
  os << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning-based attack simulator: trials, Monte Carlo sweeps and bounds"};
  app.require_subcommand(1);

  CommonOptions trial_opts, sweep_opts, bounds_opts, compare_opts;
  std::size_t trial_index = 0;
  std::size_t grid_index = 0;

  auto* trial = app.add_subcommand("trial", "Run one seeded trial and dump its trajectory as CSV");
  add_common(trial, trial_opts);
  trial->add_option("--index", trial_index, "Trial index");
  trial->add_option("--grid", grid_index, "Sweep grid index used for seed derivation");

  auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo sweep over the configured axis");
  add_common(sweep_cmd, sweep_opts);

  auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate analytic bounds without simulation");
  add_common(bounds_cmd, bounds_opts);

  auto* compare = app.add_subcommand("compare", "Empirical rates and bounds as long-format CSV");
  add_common(compare, compare_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    if (*trial) {
      const ExperimentConfig cfg = build_experiment(load_config(trial_opts));
      TrialOptions opts;
      opts.record_trajectory = true;
      const TrialOutcome t = run_trial(cfg, trial_index, grid_index, opts);
      print_trial_summary(t, std::cerr);
      if (t.trajectory) write_out(trial_opts.out, [&](std::ostream& os) { write_trajectory_csv(t, os); });
    } else if (*sweep_cmd) {
      write_report(sweep(load_config(sweep_opts)), sweep_opts);
    } else if (*bounds_cmd) {
      write_report(analytic_bounds(load_config(bounds_opts)), bounds_opts);
    } else if (*compare) {
      const SweepReport r = sweep(load_config(compare_opts));
      write_out(compare_opts.out, [&](std::ostream& os) { write_long_csv(r, os); });
    }
  } catch (const lba::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
