#include "lba/attacker.hpp"

#include <cmath>

#include "lba/errors.hpp"

namespace lba::attack {

ScalarLSState ls_update_scalar(ScalarLSState state, double x, double u, double x_next) {
  state.sum_xx += x * x;
  state.sum_cross += (x_next - u) * x;
  ++state.count;
  return state;
}

double ls_estimate_scalar(const ScalarLSState& state) {
  if (!(state.sum_xx > 0.0)) {
    throw DegenerateDataError("least-squares estimate with zero state energy");
  }
  return state.sum_cross / state.sum_xx;
}

VectorLSState ls_update_vector(VectorLSState state, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& u, const Eigen::VectorXd& x_next) {
  const Eigen::Index n = state.dim();
  if (x.size() != n || u.size() != n || x_next.size() != n) {
    throw DimensionError("ls_update_vector: expected vectors of dimension " + std::to_string(n));
  }
  state.gram.noalias() += x * x.transpose();
  state.cross.noalias() += (x_next - u) * x.transpose();
  ++state.count;
  return state;
}

bool gram_is_singular(const Eigen::MatrixXd& gram) {
  if (gram.size() == 0) return true;
  const SymmetricMatrix g(0.5 * (gram + gram.transpose()));
  return g.min_eigenvalue() < 1e-10 * (1.0 + g.trace());
}

Eigen::MatrixXd ls_estimate_vector(const VectorLSState& state) {
  const Eigen::Index n = state.dim();
  if (gram_is_singular(state.gram)) return Eigen::MatrixXd::Zero(n, n);
  // C G^{-1} = (G^{-1} C^T)^T with G symmetric.
  return state.gram.ldlt().solve(state.cross.transpose()).transpose();
}

FictitiousPlant::FictitiousPlant(std::optional<Eigen::MatrixXd> estimate,
                                 std::shared_ptr<const GpPosterior> posterior,
                                 GaussianSampler noise, Eigen::VectorXd v0)
    : estimate_(std::move(estimate)),
      posterior_(std::move(posterior)),
      noise_(std::move(noise)),
      v_(std::move(v0)) {}

FictitiousPlant FictitiousPlant::linear(Eigen::MatrixXd estimate, const SymmetricMatrix& noise_cov,
                                        Eigen::VectorXd v0) {
  const Eigen::Index n = estimate.rows();
  if (estimate.cols() != n || noise_cov.dim() != n || v0.size() != n) {
    throw DimensionError("fictitious plant: estimate, noise and v0 dimensions disagree");
  }
  GaussianSampler noise(Eigen::VectorXd::Zero(n), noise_cov);
  return FictitiousPlant(std::move(estimate), nullptr, std::move(noise), std::move(v0));
}

FictitiousPlant FictitiousPlant::scalar(double estimate, double noise_var, double v0) {
  return linear(Eigen::MatrixXd::Constant(1, 1, estimate), SymmetricMatrix::scalar(noise_var),
                Eigen::VectorXd::Constant(1, v0));
}

FictitiousPlant FictitiousPlant::gaussian_process(std::shared_ptr<const GpPosterior> posterior,
                                                  double noise_var, double v0) {
  if (!posterior) throw ContractViolation("fictitious plant: null GP posterior");
  GaussianSampler noise(Eigen::VectorXd::Zero(1), SymmetricMatrix::scalar(noise_var));
  return FictitiousPlant(std::nullopt, std::move(posterior), std::move(noise),
                         Eigen::VectorXd::Constant(1, v0));
}

Eigen::VectorXd FictitiousPlant::predict(const Eigen::VectorXd& v, const Eigen::VectorXd& u) const {
  if (v.size() != dim() || u.size() != dim()) {
    throw DimensionError("fictitious plant: input has wrong dimension");
  }
  if (estimate_) return (*estimate_) * v + u;
  return Eigen::VectorXd::Constant(1, posterior_->mean(v(0), u(0)));
}

const Eigen::VectorXd& FictitiousPlant::step(const Eigen::VectorXd& u,
                                             const Eigen::VectorXd& w_tilde) {
  if (w_tilde.size() != dim()) throw DimensionError("fictitious plant: noise has wrong dimension");
  v_ = predict(v_, u) + w_tilde;
  return v_;
}

double fictitious_step(double estimate, double v, double u, double w_tilde) {
  return estimate * v + u + w_tilde;
}

double fictitious_step(const GpPosterior& posterior, double v, double u, double w_tilde) {
  return posterior.mean(v, u) + w_tilde;
}

Eigen::VectorXd fictitious_step(const Eigen::MatrixXd& estimate, const Eigen::VectorXd& v,
                                const Eigen::VectorXd& u, const Eigen::VectorXd& w_tilde) {
  if (estimate.rows() != v.size() || estimate.cols() != v.size() || u.size() != v.size() ||
      w_tilde.size() != v.size()) {
    throw DimensionError("fictitious_step: dimension mismatch");
  }
  return estimate * v + u + w_tilde;
}

const Eigen::VectorXd& ReplayBuffer::observation(std::size_t k) const {
  const std::size_t len = recorded_.size();
  if (len == 0) throw ConfigError("replay attack with an empty recording");
  if (k <= len) {
    throw ContractViolation("replay requested at step " + std::to_string(k) +
                            " inside the recording window");
  }
  return recorded_[(k - len - 1) % len];
}

MaliciousActuation MaliciousActuation::destabilizing_for(double nominal_gain) {
  const double target = nominal_gain < 0.0 ? -1.5 : 1.5;
  return {Kind::destabilize_gain, target - nominal_gain};
}

Eigen::VectorXd malicious_input(const MaliciousActuation& rule, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& /*u_controller*/) {
  if (rule.kind == MaliciousActuation::Kind::zero) return Eigen::VectorXd::Zero(x.size());
  return rule.gain * x;
}

double malicious_input(const MaliciousActuation& rule, double x, double /*u_controller*/) {
  return rule.kind == MaliciousActuation::Kind::zero ? 0.0 : rule.gain * x;
}

}  // namespace lba::attack
