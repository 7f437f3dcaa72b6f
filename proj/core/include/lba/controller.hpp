#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "lba/linalg.hpp"
#include "lba/random.hpp"
#include "lba/trajectory.hpp"

namespace lba::control {

/// Memoryless control law applied to the current observation.
struct ControlPolicy {
  enum class Kind {
    zero,                ///< u = 0
    linear_gain,         ///< u = -Ω y (scalar)
    linear_gain_matrix,  ///< u = -K y
    quadratic,           ///< u = -c y² (scalar)
  };

  Kind kind = Kind::zero;
  double gain = 0.0;
  Eigen::MatrixXd gain_matrix;

  static ControlPolicy zero() { return {}; }
  static ControlPolicy linear(double omega) { return {Kind::linear_gain, omega, {}}; }
  static ControlPolicy matrix(Eigen::MatrixXd k) {
    return {Kind::linear_gain_matrix, 0.0, std::move(k)};
  }
  static ControlPolicy quadratic(double c) { return {Kind::quadratic, c, {}}; }
};

double control_action(const ControlPolicy& policy, double y);
Eigen::VectorXd control_action(const ControlPolicy& policy, const Eigen::VectorXd& y);

/// Signal superimposed on the nominal control.
struct PrivacySignalSpec {
  enum class Kind { none, iid_gaussian, iid_gaussian_vector, recursive_target };

  Kind kind = Kind::none;
  double variance = 0.0;       // iid_gaussian
  SymmetricMatrix covariance;  // iid_gaussian_vector
  double eta = 3.0;            // recursive_target
  /// Accept 0 < η < 3 for the recursive kind. Off by default because η ≥ 3 is
  /// the sufficient condition under which the signal is guaranteed to help.
  bool allow_small_eta = false;

  static PrivacySignalSpec none() { return {}; }
  static PrivacySignalSpec iid(double var) { return {Kind::iid_gaussian, var, {}, 3.0, false}; }
  static PrivacySignalSpec iid_vector(SymmetricMatrix cov) {
    return {Kind::iid_gaussian_vector, 0.0, std::move(cov), 3.0, false};
  }
  static PrivacySignalSpec recursive(double eta, bool allow_small = false) {
    return {Kind::recursive_target, 0.0, {}, eta, allow_small};
  }

  /// Throws ConfigError on negative variances, non-PSD covariance or bad η.
  void validate() const;
};

/// Running state of the authenticated policy U_k = Ū_k + Γ_k.
///
/// Keeps Ψ_k = Σ_{j≤k} a^{k-j} Γ_j through the recurrence Ψ_k = a Ψ_{k-1} + Γ_k.
class AuthenticatedPolicyState {
 public:
  explicit AuthenticatedPolicyState(double gain) : gain_(gain) {}

  double gain() const noexcept { return gain_; }
  double psi() const noexcept { return psi_; }
  std::size_t steps() const noexcept { return signals_.size(); }
  const std::vector<double>& signals() const noexcept { return signals_; }

  void record(double gamma);

 private:
  double gain_;
  double psi_ = 0.0;
  std::vector<double> signals_;
};

/// Next scalar privacy signal Γ_k.
///
/// For the recursive kind, Γ_k = -(a x̄_k + ū_k)/η - a Ψ_{k-1}, which makes the
/// updated accumulator hit Ψ_k = -(a x̄_k + ū_k)/η exactly.
double privacy_signal_next(const PrivacySignalSpec& spec, const AuthenticatedPolicyState& state,
                           double gain, double xbar, double ubar, RandomSource& src);

/// Returns ū + γ and folds γ into the accumulator.
double authenticated_action(AuthenticatedPolicyState& state, double ubar, double gamma);

struct LQWeights {
  double q = 1.0;
  double r = 1.0;
  void validate() const;
};

/// (1/T) Σ_{k=0..T} (q‖x_k‖² + r‖u_k‖²) over one trajectory.
double lq_cost(const Trajectory& traj, const LQWeights& weights, std::size_t horizon);

/// Controller as it runs inside a trial: nominal policy plus optional
/// privacy signal, fed one observation per step.
///
/// With the recursive signal the nominal action is evaluated on the Γ-free
/// twin state x̄_k = y_k - Ψ_{k-1}, which equals the state the plant would
/// have reached under the nominal policy alone.
class Controller {
 public:
  Controller(ControlPolicy policy, PrivacySignalSpec privacy, double true_gain, Eigen::Index dim);

  Eigen::VectorXd act(const Eigen::VectorXd& y, RandomSource& src);

  /// Ψ_k² + 2Ψ_k(a x̄_k + ū_k) for the last step (recursive signal only).
  std::optional<double> last_condition_term() const noexcept { return last_condition_; }
  const AuthenticatedPolicyState& state() const noexcept { return state_; }
  const ControlPolicy& policy() const noexcept { return policy_; }

 private:
  ControlPolicy policy_;
  PrivacySignalSpec privacy_;
  AuthenticatedPolicyState state_;
  std::optional<GaussianSampler> vector_signal_;
  std::optional<double> last_condition_;
  Eigen::Index dim_;
};

}  // namespace lba::control
