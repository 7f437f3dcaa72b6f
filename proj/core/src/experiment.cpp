#include "lba/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <thread>

#include "lba/attacker.hpp"
#include "lba/bounds.hpp"
#include "lba/controller.hpp"
#include "lba/detector.hpp"
#include "lba/errors.hpp"
#include "lba/gp.hpp"
#include "lba/linalg.hpp"
#include "lba/plant.hpp"
#include "lba/random.hpp"

namespace lba::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum Stream : std::uint64_t { kPlantStream = 0, kControlStream = 1, kAttackStream = 2 };

bool diverged(const Eigen::VectorXd& x) {
  return !x.allFinite() || x.cwiseAbs().maxCoeff() > plant::kDivergenceThreshold;
}

/// Ground truth as the trial engine sees it: one step map and one residual
/// map over dimension-n vectors, whatever the plant kind.
struct TruePlant {
  PlantKind kind;
  double a = 0.0;
  Eigen::MatrixXd gain;
  const plant::NonlinearPlant* nonlinear = nullptr;

  Eigen::VectorXd next(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
    if (kind == PlantKind::nonlinear) {
      return Eigen::VectorXd::Constant(1, nonlinear->dynamics(x(0), u(0)));
    }
    return gain * x + u;
  }

  double f(double x, double u) const {
    return kind == PlantKind::nonlinear ? nonlinear->dynamics(x, u) : a * x + u;
  }
};

SymmetricMatrix noise_covariance(const PlantSpec& p) {
  switch (p.kind) {
    case PlantKind::scalar: return SymmetricMatrix::scalar(p.scalar.noise_var);
    case PlantKind::vector: return p.vector.noise_cov;
    case PlantKind::nonlinear: return SymmetricMatrix::scalar(p.nonlinear.noise_var);
  }
  return {};
}

SymmetricMatrix initial_covariance(const PlantSpec& p) {
  switch (p.kind) {
    case PlantKind::scalar: return SymmetricMatrix::scalar(p.scalar.x0_variance());
    case PlantKind::vector: return p.vector.x0_covariance();
    case PlantKind::nonlinear: return SymmetricMatrix::scalar(p.nonlinear.x0_variance());
  }
  return {};
}

double malicious_gain_for(const ExperimentConfig& cfg, std::optional<double> estimate) {
  const auto& rule = cfg.attack.malicious;
  if (!std::isnan(rule.gain)) return rule.gain;
  if (cfg.plant.kind != PlantKind::scalar) return 0.5;
  if (estimate) return attack::MaliciousActuation::destabilizing_for(*estimate).gain;
  const double nominal =
      cfg.plant.prior.kind == plant::GainPrior::Kind::fixed ? cfg.plant.prior.value : 0.0;
  return attack::MaliciousActuation::destabilizing_for(nominal).gain;
}

}  // namespace

TrialOutcome run_trial(const ExperimentConfig& cfg, std::size_t trial_index,
                       std::size_t grid_index, const TrialOptions& options) {
  TrialOutcome out;
  out.index = trial_index;
  out.seed = derive_seed(cfg.sweep.seed, grid_index, trial_index);

  RandomSource plant_rng(out.seed, kPlantStream);
  RandomSource control_rng(out.seed, kControlStream);
  RandomSource attack_rng(out.seed, kAttackStream);

  const Eigen::Index n = cfg.plant.dim();
  const std::size_t horizon = cfg.detector.test_time;
  const bool attacked = cfg.attacked();
  const std::size_t learning = attacked ? cfg.attack.learning : 0;
  const AttackKind attack_kind = cfg.attack.kind;

  TruePlant truth;
  truth.kind = cfg.plant.kind;
  switch (cfg.plant.kind) {
    case PlantKind::scalar:
      truth.a = plant::sample_gain(cfg.plant.prior, plant_rng);
      truth.gain = Eigen::MatrixXd::Constant(1, 1, truth.a);
      out.sampled_gain = truth.gain;
      break;
    case PlantKind::vector:
      truth.gain = cfg.plant.vector.gain;
      out.sampled_gain = truth.gain;
      break;
    case PlantKind::nonlinear:
      truth.nonlinear = &cfg.plant.nonlinear;
      out.sampled_gain = Eigen::MatrixXd::Constant(1, 1, kNaN);
      break;
  }

  const SymmetricMatrix noise_cov = noise_covariance(cfg.plant);
  const GaussianSampler noise(Eigen::VectorXd::Zero(n), noise_cov);
  std::optional<GaussianSampler> learning_noise;
  if (cfg.plant.learning_noise_var) {
    learning_noise.emplace(Eigen::VectorXd::Zero(n),
                           SymmetricMatrix(*cfg.plant.learning_noise_var *
                                           Eigen::MatrixXd::Identity(n, n)));
  }

  control::Controller controller(cfg.controller.policy, cfg.controller.privacy, truth.a, n);
  const double sigma2 = noise_cov.trace() / static_cast<double>(n);

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd x0 =
      GaussianSampler(Eigen::VectorXd::Zero(n), initial_covariance(cfg.plant))(plant_rng);
  Eigen::VectorXd x = truth.next(x0, zero);  // X_1 = f(X_0, 0)
  Eigen::VectorXd y = x;

  if (options.record_trajectory) {
    out.trajectory.emplace(n);
    out.trajectory->start(x0);
  }

  // Learners.
  attack::ScalarLSState scalar_ls;
  attack::VectorLSState vector_ls(n);
  attack::GPState gp_state;
  gp_state.kernel = cfg.attack.kernel;
  gp_state.noise_var = sigma2;
  gp_state.standardize = cfg.attack.gp_standardize;
  attack::ReplayBuffer replay;
  std::vector<Eigen::VectorXd> learning_states;

  std::optional<attack::FictitiousPlant> fictitious;
  attack::MaliciousActuation malicious = cfg.attack.malicious;

  detect::ResidualAccumulator residuals(n);
  double lq_sum = cfg.controller.weights.q * x0.squaredNorm();
  double fictitious_power = 0.0;
  std::size_t fictitious_steps = 0;

  // Nonlinear-bound bookkeeping over the hijack window (L, L + c].
  const std::size_t gap = cfg.bounds.horizon_gap.value_or(horizon > learning ? horizon - learning : 0);
  double gp_log_keep = 0.0;
  double nu_sq = 0.0;
  double nu_noise = 0.0;
  bool xi_zero_factor = false;

  const bool linear_plant = cfg.plant.kind != PlantKind::nonlinear;
  if (attacked && linear_plant) out.signal_power_sum = (truth.gain * x0).squaredNorm();

  bool plant_frozen = false;
  bool aborted = false;
  for (std::size_t k = 1; k <= horizon; ++k) {
    const bool hijack_step = attacked && k >= learning + 1;
    const Eigen::VectorXd u = controller.act(y, control_rng);
    if (auto c = controller.last_condition_term()) out.condition_terms.push_back(*c);

    Eigen::VectorXd applied = u;
    if (hijack_step) applied = attack::malicious_input(malicious, x, u);

    const bool learning_data = attacked && k + 1 <= learning;
    const Eigen::VectorXd w =
        (learning_data && learning_noise) ? (*learning_noise)(plant_rng) : noise(plant_rng);

    Eigen::VectorXd x_next = x;
    if (!plant_frozen) {
      x_next = truth.next(x, applied) + w;
      if (diverged(x_next)) {
        plant_frozen = true;
        out.diverged_at = k + 1;
        x_next = x;
        if (!hijack_step) {
          out.valid = false;
          out.diagnostic = "true plant diverged at step " + std::to_string(k + 1) +
                           " before the hijack phase";
          return out;
        }
      }
    }

    if (options.record_trajectory) out.trajectory->push(x, hijack_step ? applied : u, y, w, y != x);

    // Learning phase: the attacker sees (x_k, u_k, x_{k+1}) for k <= L - 1.
    if (learning_data) {
      if (linear_plant) out.signal_power_sum += (truth.gain * x + u).squaredNorm();
      switch (attack_kind) {
        case AttackKind::ls_scalar:
          scalar_ls = attack::ls_update_scalar(scalar_ls, x(0), u(0), x_next(0));
          break;
        case AttackKind::ls_vector:
          vector_ls = attack::ls_update_vector(std::move(vector_ls), x, u, x_next);
          learning_states.push_back(x);
          out.noise_state_sum += w.norm() * x.norm();
          break;
        case AttackKind::gp:
          gp_state.add(x(0), u(0), x_next(0));
          break;
        default:
          break;
      }
    }
    if (attacked && attack_kind == AttackKind::replay && k <= learning) replay.record(y);

    if (attacked && k == learning) {
      // End of learning: V_L = X_L.
      std::optional<double> scalar_estimate;
      switch (attack_kind) {
        case AttackKind::ls_scalar: {
          try {
            scalar_estimate = attack::ls_estimate_scalar(scalar_ls);
          } catch (const DegenerateDataError& e) {
            out.valid = false;
            out.diagnostic = e.what();
            return out;
          }
          out.estimate = Eigen::MatrixXd::Constant(1, 1, *scalar_estimate);
          fictitious = attack::FictitiousPlant::scalar(*scalar_estimate, sigma2, x(0));
          break;
        }
        case AttackKind::ls_vector: {
          Eigen::MatrixXd est = attack::ls_estimate_vector(vector_ls);
          out.estimate = est;
          out.estimate_error_norm = operator_norm(est - truth.gain);
          out.pe_event = detect::persistent_excitation_check(learning_states, cfg.bounds.zeta);
          const double error_bound =
              out.noise_state_sum / (cfg.bounds.zeta * static_cast<double>(learning));
          out.error_bound_violated =
              out.pe_event && out.estimate_error_norm > error_bound * (1.0 + 1e-12) + 1e-12;
          fictitious = attack::FictitiousPlant::linear(std::move(est), noise_cov, x);
          break;
        }
        case AttackKind::gp: {
          std::shared_ptr<const attack::GpPosterior> post;
          try {
            post = std::make_shared<const attack::GpPosterior>(attack::gp_fit(gp_state));
            out.gp_psi = bounds::info_gain_psi(attack::sequential_posterior_variances(gp_state),
                                               sigma2);
          } catch (const DegenerateDataError& e) {
            out.valid = false;
            out.diagnostic = e.what();
            return out;
          }
          fictitious = attack::FictitiousPlant::gaussian_process(std::move(post), sigma2, x(0));
          break;
        }
        default:
          break;
      }
      if (malicious.kind == attack::MaliciousActuation::Kind::destabilize_gain) {
        malicious.gain = malicious_gain_for(cfg, scalar_estimate);
      }
    }

    // Observation at k + 1.
    Eigen::VectorXd y_next;
    if (attacked && k >= learning) {
      if (fictitious) {
        const Eigen::VectorXd v = fictitious->state();
        const Eigen::VectorXd w_tilde = fictitious->draw_noise(attack_rng);
        if (attack_kind == AttackKind::gp && k + 1 <= learning + gap) {
          const auto post = fictitious->posterior()->posterior(v(0), u(0));
          const double nu = std::abs(truth.f(v(0), u(0)) - post.mean);
          const double xi = bounds::gp_confidence_xi(out.gp_psi, cfg.plant.nonlinear.rkhs_norm_bound,
                                                     std::sqrt(sigma2), std::sqrt(post.variance), nu);
          if (xi >= 1.0) {
            xi_zero_factor = true;
          } else {
            gp_log_keep += std::log1p(-xi);
          }
          nu_sq += nu * nu;
          nu_noise += std::abs(w_tilde(0)) * nu;
        }
        y_next = fictitious->step(u, w_tilde);
        if (diverged(y_next)) {
          out.fictitious_diverged = true;
          aborted = true;
          break;
        }
        fictitious_power += y_next.squaredNorm();
        ++fictitious_steps;
      } else {
        y_next = replay.observation(k + 1);
      }
    } else {
      y_next = x_next;
    }

    // Residual r_k = y_{k+1} - f(y_k, u_k) with the true model.
    if (cfg.plant.kind == PlantKind::nonlinear) {
      residuals.add(detect::residual_nonlinear(cfg.plant.nonlinear.dynamics, y_next(0), y(0), u(0)));
    } else if (n == 1) {
      residuals.add(detect::residual_scalar(truth.a, y_next(0), y(0), u(0)));
    } else {
      residuals.add(detect::residual_vector(truth.gain, y_next, y, u));
    }

    if (!attacked) {
      lq_sum += cfg.controller.weights.q * x.squaredNorm() + cfg.controller.weights.r * u.squaredNorm();
    }

    x = std::move(x_next);
    y = std::move(y_next);
  }

  out.hijacked = attacked;
  if (options.record_trajectory && out.trajectory) {
    out.hijacked = out.trajectory->tampered_through(out.trajectory->size() - 1) || attacked;
  }

  if (aborted) {
    out.alarm = true;
    out.statistic = std::numeric_limits<double>::infinity();
  } else if (cfg.detector.test == TestKind::variance) {
    const detect::VarianceTestConfig vt{cfg.detector.tolerance, horizon};
    const auto verdict = detect::variance_test(residuals, sigma2, vt);
    out.alarm = verdict.alarm;
    out.statistic = verdict.statistic;
  } else {
    const detect::CovarianceTestConfig ct{cfg.detector.tolerance, horizon};
    const auto verdict = detect::covariance_test(residuals, noise_cov, ct);
    out.alarm = verdict.alarm;
    out.statistic = verdict.statistic;
  }
  out.deceived = out.hijacked && !out.alarm;

  if (!attacked) out.lq_cost = lq_sum / static_cast<double>(horizon);

  // β: configured, (1 - (Â - Ω)²)/σ² for a linear scalar policy, else the
  // empirical inverse power of the fictitious reading.
  if (cfg.bounds.beta) {
    out.beta = *cfg.bounds.beta;
  } else if (attack_kind == AttackKind::ls_scalar &&
             cfg.controller.policy.kind == control::ControlPolicy::Kind::linear_gain) {
    const double gap_est = (*out.estimate)(0, 0) - cfg.controller.policy.gain;
    if (std::abs(gap_est) < 1.0) out.beta = bounds::beta_linear((*out.estimate)(0, 0),
                                                               cfg.controller.policy.gain, sigma2);
  } else if (fictitious_steps > 0) {
    out.beta = static_cast<double>(fictitious_steps) / fictitious_power;
  }
  if (attack_kind == AttackKind::ls_scalar) {
    out.lb_thm1 = std::isfinite(out.beta) && out.beta > 0.0
                      ? bounds::deception_lower_bound({cfg.detector.tolerance, out.beta, learning,
                                                       cfg.plant.prior.half_width, sigma2})
                      : 0.0;
  }

  if (attack_kind == AttackKind::gp && !std::isnan(out.gp_psi)) {
    out.gp_xi_product = xi_zero_factor ? 0.0 : std::exp(gp_log_keep);
    const double denom = static_cast<double>(learning + gap);
    out.gp_nu_condition = !aborted && denom > 0.0 &&
                          nu_sq / denom + 2.0 * nu_noise / denom <= cfg.detector.tolerance;
  }
  return out;
}

RateEstimate rate_of(const std::vector<TrialOutcome>& outcomes, bool attacked) {
  RateEstimate r;
  r.trials = outcomes.size();
  std::size_t hits = 0;
  for (const auto& o : outcomes) {
    if (!o.valid) continue;
    ++r.valid;
    if (attacked ? o.deceived : o.alarm) ++hits;
  }
  if (r.valid == 0) throw Error("no valid trials among " + std::to_string(r.trials));
  const double nv = static_cast<double>(r.valid);
  r.rate = static_cast<double>(hits) / nv;
  r.std_error = std::sqrt(r.rate * (1.0 - r.rate) / nv);
  return r;
}

MonteCarloResult monte_carlo(const ExperimentConfig& cfg, std::size_t n, std::size_t threads,
                             std::size_t grid_index) {
  if (n < 1) throw ConfigError("monte carlo needs at least one trial");
  MonteCarloResult result;
  result.outcomes.resize(n);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        result.outcomes[i] = run_trial(cfg, i, grid_index);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };

  const std::size_t pool = std::max<std::size_t>(1, std::min(threads, n));
  if (pool == 1) {
    worker();
  } else {
    std::vector<std::jthread> workers;
    workers.reserve(pool);
    for (std::size_t t = 0; t < pool; ++t) workers.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  result.rate = rate_of(result.outcomes, cfg.attacked());
  return result;
}

namespace {

std::optional<double> finite_mean(const std::vector<TrialOutcome>& outcomes,
                                  double TrialOutcome::*field) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& o : outcomes) {
    if (!o.valid || !std::isfinite(o.*field)) continue;
    sum += o.*field;
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

bool linear_scalar_policy(const ExperimentConfig& cfg) {
  return cfg.plant.kind == PlantKind::scalar &&
         (cfg.controller.policy.kind == control::ControlPolicy::Kind::linear_gain ||
          cfg.controller.policy.kind == control::ControlPolicy::Kind::zero);
}

std::optional<double> g_bound(const ExperimentConfig& cfg, double signal_power_sum, double beta) {
  if (cfg.plant.prior.kind != plant::GainPrior::Kind::uniform) return std::nullopt;
  if (cfg.controller.depends_on_gain) return std::nullopt;
  try {
    return bounds::g_upper_bound(signal_power_sum, cfg.plant.scalar.noise_var,
                                 cfg.plant.prior.half_width, cfg.detector.tolerance, beta);
  } catch (const OutOfRegimeError&) {
    return std::nullopt;
  }
}

}  // namespace

void fill_bounds(SweepPoint& point, const ExperimentConfig& cfg,
                 const std::vector<TrialOutcome>& outcomes) {
  const AttackKind kind = cfg.attack.kind;
  if (kind == AttackKind::ls_scalar) {
    point.lb_thm1 = finite_mean(outcomes, &TrialOutcome::lb_thm1);
    if (linear_scalar_policy(cfg)) {
      const auto power = finite_mean(outcomes, &TrialOutcome::signal_power_sum);
      const auto beta = cfg.bounds.beta ? cfg.bounds.beta : finite_mean(outcomes, &TrialOutcome::beta);
      if (power && beta) point.ub_cor1 = g_bound(cfg, *power, *beta);
    }
  }
  if (kind == AttackKind::ls_vector) {
    std::vector<bounds::VectorTrialTerms> terms;
    std::size_t pe = 0;
    for (const auto& o : outcomes) {
      if (!o.valid) continue;
      terms.push_back({o.pe_event, o.noise_state_sum, std::isfinite(o.beta) ? o.beta : 0.0});
      if (o.pe_event) ++pe;
    }
    if (!terms.empty()) {
      const double rho = cfg.bounds.rho.value_or(static_cast<double>(pe) /
                                                 static_cast<double>(terms.size()));
      point.lb_thm3 = bounds::vector_lower_bound_estimate(terms, cfg.bounds.zeta, cfg.attack.learning,
                                                          cfg.detector.tolerance, rho);
    }
  }
  if (kind == AttackKind::gp) {
    std::size_t valid = 0;
    std::size_t hits = 0;
    double keep = 0.0;
    for (const auto& o : outcomes) {
      if (!o.valid || std::isnan(o.gp_xi_product)) continue;
      ++valid;
      if (o.gp_nu_condition) ++hits;
      keep += o.gp_xi_product;
    }
    if (valid > 0) {
      const double p_bar = static_cast<double>(hits) / static_cast<double>(valid);
      point.lb_thm4 = bounds::clip_probability(p_bar * keep / static_cast<double>(valid));
    }
  }
  point.lq_cost_mean = finite_mean(outcomes, &TrialOutcome::lq_cost);
}

namespace {

std::string x0_source(const ExperimentConfig& cfg) {
  return cfg.plant.x0_defaulted ? "default: zero-mean Gaussian with the disturbance covariance"
                                : "configured initial covariance";
}

template <typename PointFn>
SweepReport run_axis(const KeyValueConfig& kv, PointFn&& fn) {
  const ExperimentConfig base = build_experiment(kv);
  SweepReport report;
  report.config_hash = base.hash;
  report.seed = base.sweep.seed;
  report.x0_source = x0_source(base);
  if (base.sweep.axis.empty()) {
    report.axis_name = "none";
    SweepPoint p = fn(base, 0);
    p.axis_value = 0.0;
    report.points.push_back(std::move(p));
    return report;
  }
  report.axis_name = base.sweep.axis;
  for (std::size_t i = 0; i < base.sweep.values.size(); ++i) {
    const double value = base.sweep.values[i];
    const ExperimentConfig cfg = build_experiment(with_axis_value(kv, base.sweep.axis, value));
    SweepPoint p = fn(cfg, i);
    p.axis_value = value;
    report.points.push_back(std::move(p));
  }
  return report;
}

}  // namespace

SweepReport sweep(const KeyValueConfig& kv) {
  return run_axis(kv, [](const ExperimentConfig& cfg, std::size_t grid) {
    SweepPoint p;
    p.config_hash = cfg.hash;
    p.n_trials = cfg.sweep.trials;
    MonteCarloResult mc;
    try {
      mc = monte_carlo(cfg, cfg.sweep.trials, cfg.sweep.threads, grid);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error&) {
      p.n_valid = 0;
      return p;
    }
    p.n_valid = mc.rate.valid;
    if (cfg.attacked()) {
      p.p_dec = mc.rate.rate;
    } else {
      p.p_fa = mc.rate.rate;
    }
    p.std_error = mc.rate.std_error;
    fill_bounds(p, cfg, mc.outcomes);
    return p;
  });
}

SweepReport analytic_bounds(const KeyValueConfig& kv) {
  return run_axis(kv, [](const ExperimentConfig& cfg, std::size_t) {
    SweepPoint p;
    p.config_hash = cfg.hash;
    if (cfg.plant.kind != PlantKind::scalar || !linear_scalar_policy(cfg)) return p;
    const double sigma2 = cfg.plant.scalar.noise_var;
    const double omega = cfg.controller.policy.kind == control::ControlPolicy::Kind::linear_gain
                             ? cfg.controller.policy.gain
                             : 0.0;
    const std::size_t learning = cfg.attack.learning;
    std::optional<double> beta = cfg.bounds.beta;
    if (!beta && cfg.plant.prior.kind == plant::GainPrior::Kind::fixed) {
      try {
        beta = bounds::beta_linear(cfg.plant.prior.value, omega, sigma2);
      } catch (const NonStabilizingError&) {
      }
    }
    if (!beta || learning < 1) return p;
    p.lb_thm1 = bounds::deception_lower_bound(
        {cfg.detector.tolerance, *beta, learning, cfg.plant.prior.half_width, sigma2});
    const double power = bounds::expected_signal_power_sum(cfg.plant.prior, omega, sigma2,
                                                           cfg.plant.scalar.x0_variance(), learning);
    p.ub_cor1 = g_bound(cfg, power, *beta);
    return p;
  });
}

}  // namespace lba::harness
