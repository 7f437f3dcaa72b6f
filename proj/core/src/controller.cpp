#include "lba/controller.hpp"

#include <cmath>

#include "lba/errors.hpp"

namespace lba::control {

double control_action(const ControlPolicy& policy, double y) {
  switch (policy.kind) {
    case ControlPolicy::Kind::zero:
      return 0.0;
    case ControlPolicy::Kind::linear_gain:
      return -policy.gain * y;
    case ControlPolicy::Kind::quadratic:
      return -policy.gain * y * y;
    case ControlPolicy::Kind::linear_gain_matrix:
      if (policy.gain_matrix.rows() != 1 || policy.gain_matrix.cols() != 1) {
        throw DimensionError("control_action: scalar observation for a " +
                             std::to_string(policy.gain_matrix.rows()) + "x" +
                             std::to_string(policy.gain_matrix.cols()) + " gain");
      }
      return -policy.gain_matrix(0, 0) * y;
  }
  return 0.0;
}

Eigen::VectorXd control_action(const ControlPolicy& policy, const Eigen::VectorXd& y) {
  if (policy.kind == ControlPolicy::Kind::linear_gain_matrix) {
    if (policy.gain_matrix.cols() != y.size()) {
      throw DimensionError("control_action: gain has " + std::to_string(policy.gain_matrix.cols()) +
                           " columns, observation has dimension " + std::to_string(y.size()));
    }
    return -policy.gain_matrix * y;
  }
  if (policy.kind == ControlPolicy::Kind::zero) return Eigen::VectorXd::Zero(y.size());
  if (y.size() != 1) {
    throw DimensionError("control_action: scalar policy given an observation of dimension " +
                         std::to_string(y.size()));
  }
  return Eigen::VectorXd::Constant(1, control_action(policy, y(0)));
}

void PrivacySignalSpec::validate() const {
  switch (kind) {
    case Kind::none:
      return;
    case Kind::iid_gaussian:
      if (!(variance >= 0.0) || !std::isfinite(variance)) {
        throw ConfigError("privacy signal variance must be finite and >= 0");
      }
      return;
    case Kind::iid_gaussian_vector:
      if (covariance.dim() < 1) throw ConfigError("privacy signal covariance is empty");
      if (!is_psd(covariance)) {
        throw ConfigError("privacy signal covariance must be positive semidefinite");
      }
      return;
    case Kind::recursive_target:
      if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("eta must be finite and > 0");
      if (eta < 3.0 && !allow_small_eta) {
        throw ConfigError("eta must be >= 3 for the recursive privacy signal (got " +
                          std::to_string(eta) + ")");
      }
      return;
  }
}

void AuthenticatedPolicyState::record(double gamma) {
  psi_ = gain_ * psi_ + gamma;
  signals_.push_back(gamma);
}

double privacy_signal_next(const PrivacySignalSpec& spec, const AuthenticatedPolicyState& state,
                           double gain, double xbar, double ubar, RandomSource& src) {
  switch (spec.kind) {
    case PrivacySignalSpec::Kind::none:
      return 0.0;
    case PrivacySignalSpec::Kind::iid_gaussian:
      return src.normal(0.0, spec.variance);
    case PrivacySignalSpec::Kind::iid_gaussian_vector:
      throw ContractViolation("privacy_signal_next: vector signal requested on the scalar path");
    case PrivacySignalSpec::Kind::recursive_target:
      return -(gain * xbar + ubar) / spec.eta - gain * state.psi();
  }
  return 0.0;
}

double authenticated_action(AuthenticatedPolicyState& state, double ubar, double gamma) {
  state.record(gamma);
  return ubar + gamma;
}

void LQWeights::validate() const {
  if (!(q >= 0.0) || !(r >= 0.0)) throw ConfigError("LQ weights must be >= 0");
}

double lq_cost(const Trajectory& traj, const LQWeights& weights, std::size_t horizon) {
  if (horizon == 0) throw ContractViolation("lq_cost: horizon must be >= 1");
  if (traj.size() < horizon + 1) {
    throw ContractViolation("lq_cost: trajectory has " + std::to_string(traj.size()) +
                            " steps, horizon needs " + std::to_string(horizon + 1));
  }
  double total = 0.0;
  for (std::size_t k = 0; k <= horizon; ++k) {
    total += weights.q * traj.states()[k].squaredNorm() + weights.r * traj.controls()[k].squaredNorm();
  }
  return total / static_cast<double>(horizon);
}

Controller::Controller(ControlPolicy policy, PrivacySignalSpec privacy, double true_gain,
                       Eigen::Index dim)
    : policy_(std::move(policy)), privacy_(std::move(privacy)), state_(true_gain), dim_(dim) {
  privacy_.validate();
  if (privacy_.kind == PrivacySignalSpec::Kind::iid_gaussian_vector) {
    if (privacy_.covariance.dim() != dim) {
      throw DimensionError("privacy covariance dimension does not match the plant");
    }
    vector_signal_.emplace(Eigen::VectorXd::Zero(dim), privacy_.covariance);
  } else if (privacy_.kind != PrivacySignalSpec::Kind::none && dim != 1) {
    throw ConfigError("scalar privacy signal on a vector plant");
  }
}

Eigen::VectorXd Controller::act(const Eigen::VectorXd& y, RandomSource& src) {
  if (y.size() != dim_) throw DimensionError("controller: observation has wrong dimension");
  switch (privacy_.kind) {
    case PrivacySignalSpec::Kind::none:
      return control_action(policy_, y);
    case PrivacySignalSpec::Kind::iid_gaussian_vector:
      return control_action(policy_, y) + (*vector_signal_)(src);
    case PrivacySignalSpec::Kind::iid_gaussian: {
      const double ubar = control_action(policy_, y(0));
      const double gamma = privacy_signal_next(privacy_, state_, state_.gain(), y(0), ubar, src);
      return Eigen::VectorXd::Constant(1, authenticated_action(state_, ubar, gamma));
    }
    case PrivacySignalSpec::Kind::recursive_target: {
      const double a = state_.gain();
      const double xbar = y(0) - state_.psi();
      const double ubar = control_action(policy_, xbar);
      const double gamma = privacy_signal_next(privacy_, state_, a, xbar, ubar, src);
      const double u = authenticated_action(state_, ubar, gamma);
      const double psi = state_.psi();
      last_condition_ = psi * psi + 2.0 * psi * (a * xbar + ubar);
      return Eigen::VectorXd::Constant(1, u);
    }
  }
  return Eigen::VectorXd::Zero(dim_);
}

}  // namespace lba::control
