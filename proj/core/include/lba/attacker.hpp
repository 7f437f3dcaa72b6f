#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "lba/gp.hpp"
#include "lba/linalg.hpp"
#include "lba/random.hpp"

namespace lba::attack {

/// Running sums of the scalar least-squares regression of x_{k+1} - u_k on x_k.
struct ScalarLSState {
  double sum_xx = 0.0;
  double sum_cross = 0.0;
  std::size_t count = 0;
};

ScalarLSState ls_update_scalar(ScalarLSState state, double x, double u, double x_next);

/// sum_cross / sum_xx. Throws DegenerateDataError when sum_xx == 0.
double ls_estimate_scalar(const ScalarLSState& state);

/// Gram G = Σ x xᵀ and cross term C = Σ (x_{k+1} - u_k) xᵀ.
struct VectorLSState {
  Eigen::MatrixXd gram;
  Eigen::MatrixXd cross;
  std::size_t count = 0;

  explicit VectorLSState(Eigen::Index n)
      : gram(Eigen::MatrixXd::Zero(n, n)), cross(Eigen::MatrixXd::Zero(n, n)) {}
  Eigen::Index dim() const noexcept { return gram.rows(); }
};

VectorLSState ls_update_vector(VectorLSState state, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& u, const Eigen::VectorXd& x_next);

/// True when the smallest Gram eigenvalue is below 1e-10 (1 + tr G).
bool gram_is_singular(const Eigen::MatrixXd& gram);

/// C G⁻¹, or the zero matrix when G is singular.
Eigen::MatrixXd ls_estimate_vector(const VectorLSState& state);

/// The attacker's simulated plant fed to the controller during hijacking.
///
/// Linear kinds advance v ← Â v + u + w̃; the GP kind advances
/// v ← M(v, u) + w̃ with M the posterior mean. w̃ ~ N(0, Σ) uses the true
/// disturbance covariance.
class FictitiousPlant {
 public:
  static FictitiousPlant linear(Eigen::MatrixXd estimate, const SymmetricMatrix& noise_cov,
                                Eigen::VectorXd v0);
  static FictitiousPlant scalar(double estimate, double noise_var, double v0);
  static FictitiousPlant gaussian_process(std::shared_ptr<const GpPosterior> posterior,
                                          double noise_var, double v0);

  const Eigen::VectorXd& state() const noexcept { return v_; }
  Eigen::Index dim() const noexcept { return v_.size(); }

  /// Draws w̃ for the next step.
  Eigen::VectorXd draw_noise(RandomSource& src) const { return noise_(src); }
  /// Advances v and returns the new fictitious reading.
  const Eigen::VectorXd& step(const Eigen::VectorXd& u, const Eigen::VectorXd& w_tilde);
  /// Model prediction without noise, F̂(v, u).
  Eigen::VectorXd predict(const Eigen::VectorXd& v, const Eigen::VectorXd& u) const;

  const std::optional<Eigen::MatrixXd>& estimate() const noexcept { return estimate_; }
  const std::shared_ptr<const GpPosterior>& posterior() const noexcept { return posterior_; }

 private:
  FictitiousPlant(std::optional<Eigen::MatrixXd> estimate,
                  std::shared_ptr<const GpPosterior> posterior, GaussianSampler noise,
                  Eigen::VectorXd v0);

  std::optional<Eigen::MatrixXd> estimate_;
  std::shared_ptr<const GpPosterior> posterior_;
  GaussianSampler noise_;
  Eigen::VectorXd v_;
};

double fictitious_step(double estimate, double v, double u, double w_tilde);
double fictitious_step(const GpPosterior& posterior, double v, double u, double w_tilde);
Eigen::VectorXd fictitious_step(const Eigen::MatrixXd& estimate, const Eigen::VectorXd& v,
                                const Eigen::VectorXd& u, const Eigen::VectorXd& w_tilde);

/// Recording of the first L observations, replayed periodically.
class ReplayBuffer {
 public:
  void record(const Eigen::VectorXd& y) { recorded_.push_back(y); }
  std::size_t size() const noexcept { return recorded_.size(); }

  /// Observation shown at step k > L: recorded[1 + ((k - L - 1) mod L)],
  /// 1-based, with L the recording length. Throws ConfigError when empty.
  const Eigen::VectorXd& observation(std::size_t k) const;

 private:
  std::vector<Eigen::VectorXd> recorded_;
};

/// Input the attacker feeds the true plant during hijacking.
struct MaliciousActuation {
  enum class Kind { destabilize_gain, zero };
  Kind kind = Kind::destabilize_gain;
  double gain = 0.5;

  /// μ with |a + μ| = 1.5 for a nominal gain a, pushing away from zero.
  static MaliciousActuation destabilizing_for(double nominal_gain);
  static MaliciousActuation zero() { return {Kind::zero, 0.0}; }
};

/// destabilize_gain returns μ x; zero returns 0. The controller's action is ignored.
Eigen::VectorXd malicious_input(const MaliciousActuation& rule, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& u_controller);
double malicious_input(const MaliciousActuation& rule, double x, double u_controller);

}  // namespace lba::attack
