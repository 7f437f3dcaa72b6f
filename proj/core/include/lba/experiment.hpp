#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lba/config.hpp"
#include "lba/trajectory.hpp"

namespace lba::harness {

/// Everything recorded about one seeded trial.
struct TrialOutcome {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool valid = true;
  std::string diagnostic;

  Eigen::MatrixXd sampled_gain;            // a (1×1) or A
  std::optional<Eigen::MatrixXd> estimate;  // Â for the LS attacks

  bool hijacked = false;  // Θ_T
  bool alarm = false;     // θ̂_T
  double statistic = 0.0;
  bool deceived = false;  // Θ_T = 1 and θ̂_T = 0

  std::optional<std::size_t> diverged_at;  // true plant
  bool fictitious_diverged = false;

  /// Inverse power of the fictitious reading used in the bounds.
  double beta = std::numeric_limits<double>::quiet_NaN();
  /// Per-trial clipped LS lower bound (scalar LS attack only).
  double lb_thm1 = std::numeric_limits<double>::quiet_NaN();
  /// Σ_{k=1..L} (a x_{k-1} + u_{k-1})².
  double signal_power_sum = 0.0;

  bool pe_event = false;
  double noise_state_sum = 0.0;  // Σ_{k<L} ‖w_k x_kᵀ‖_op
  double estimate_error_norm = std::numeric_limits<double>::quiet_NaN();
  bool error_bound_violated = false;

  double lq_cost = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> condition_terms;  // one per step, k = 1..T

  double gp_psi = std::numeric_limits<double>::quiet_NaN();
  double gp_xi_product = std::numeric_limits<double>::quiet_NaN();
  bool gp_nu_condition = false;

  std::optional<Trajectory> trajectory;
};

struct TrialOptions {
  bool record_trajectory = false;
};

/// Runs trial `trial_index` of sweep point `grid_index`; the seed is
/// derive_seed(cfg.sweep.seed, grid_index, trial_index).
TrialOutcome run_trial(const ExperimentConfig& cfg, std::size_t trial_index,
                       std::size_t grid_index = 0, const TrialOptions& options = {});

/// Empirical rate with binomial standard error √(p(1-p)/N).
struct RateEstimate {
  double rate = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  std::size_t valid = 0;
};

/// Deception rate over attacked trials, or false-alarm rate when no attack
/// is configured. Throws Error when no trial is valid.
RateEstimate rate_of(const std::vector<TrialOutcome>& outcomes, bool attacked);

struct MonteCarloResult {
  RateEstimate rate;
  std::vector<TrialOutcome> outcomes;
};

/// Runs n trials on a pool of `threads` workers; outcomes come back ordered
/// by trial index whatever the scheduling.
MonteCarloResult monte_carlo(const ExperimentConfig& cfg, std::size_t n, std::size_t threads = 1,
                             std::size_t grid_index = 0);

struct SweepPoint {
  double axis_value = 0.0;
  std::size_t n_trials = 0;
  std::size_t n_valid = 0;
  std::optional<double> p_dec;
  std::optional<double> p_fa;
  std::optional<double> std_error;
  std::optional<double> lb_thm1;
  std::optional<double> ub_cor1;
  std::optional<double> lb_thm3;
  std::optional<double> lb_thm4;
  std::optional<double> lq_cost_mean;
  std::string config_hash;
};

struct SweepReport {
  std::string axis_name;
  std::vector<SweepPoint> points;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string x0_source;
};

/// Bound columns computed from a finished Monte Carlo run.
void fill_bounds(SweepPoint& point, const ExperimentConfig& cfg,
                 const std::vector<TrialOutcome>& outcomes);

/// One Monte Carlo run plus bound columns per value of the configured axis
/// (a single point when no axis is set).
SweepReport sweep(const KeyValueConfig& kv);

/// Analytic bounds only, no simulation.
SweepReport analytic_bounds(const KeyValueConfig& kv);

}  // namespace lba::harness
