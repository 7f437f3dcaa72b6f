#include "lba/gp.hpp"

#include <cmath>

#include "lba/errors.hpp"

namespace lba::attack {

double SumKernel::rbf(const Eigen::Vector2d& a, const Eigen::Vector2d& b) const {
  return signal_var * std::exp(-(a - b).squaredNorm() / (2.0 * length_scale * length_scale));
}

void SumKernel::validate() const {
  if (!(length_scale > 0.0)) throw ConfigError("kernel length scale must be > 0");
  if (!(signal_var >= 0.0)) throw ConfigError("kernel signal variance must be >= 0");
  if (!(white_var >= 0.0)) throw ConfigError("kernel white variance must be >= 0");
}

void GPState::add(double x, double u, double x_next) {
  inputs.emplace_back(x, u);
  outputs.push_back(x_next);
}

namespace {

struct Standardization {
  Eigen::Vector2d shift = Eigen::Vector2d::Zero();
  Eigen::Vector2d scale = Eigen::Vector2d::Ones();
};

Standardization standardization_of(const GPState& state) {
  Standardization s;
  if (!state.standardize || state.inputs.empty()) return s;
  const double m = static_cast<double>(state.inputs.size());
  for (const auto& z : state.inputs) s.shift += z;
  s.shift /= m;
  Eigen::Vector2d var = Eigen::Vector2d::Zero();
  for (const auto& z : state.inputs) var += (z - s.shift).cwiseAbs2();
  var /= m;
  for (int i = 0; i < 2; ++i) s.scale(i) = var(i) > 0.0 ? std::sqrt(var(i)) : 1.0;
  return s;
}

std::vector<Eigen::Vector2d> rescale(const Standardization& s, const std::vector<Eigen::Vector2d>& zs) {
  std::vector<Eigen::Vector2d> out;
  out.reserve(zs.size());
  for (const auto& z : zs) out.emplace_back((z - s.shift).cwiseQuotient(s.scale));
  return out;
}

void check_state(const GPState& state) {
  state.kernel.validate();
  if (!(state.noise_var >= 0.0)) throw ConfigError("GP noise variance must be >= 0");
  if (state.inputs.size() != state.outputs.size()) {
    throw DimensionError("GP state has mismatched inputs and outputs");
  }
  if (state.inputs.empty()) throw DegenerateDataError("GP fit on an empty learning set");
  if (state.inputs.size() > kMaxGpPoints) {
    throw ConfigError("GP learning set of " + std::to_string(state.inputs.size()) +
                      " points exceeds the limit of " + std::to_string(kMaxGpPoints));
  }
}

}  // namespace

GpPosterior::GpPosterior(SumKernel kernel, Eigen::Vector2d shift, Eigen::Vector2d scale,
                         std::vector<Eigen::Vector2d> scaled_inputs,
                         Eigen::LLT<Eigen::MatrixXd> factor, Eigen::VectorXd weights)
    : kernel_(kernel),
      shift_(std::move(shift)),
      scale_(std::move(scale)),
      inputs_(std::move(scaled_inputs)),
      factor_(std::move(factor)),
      weights_(std::move(weights)) {}

Eigen::Vector2d GpPosterior::scaled(double x, double u) const {
  return (Eigen::Vector2d(x, u) - shift_).cwiseQuotient(scale_);
}

Eigen::VectorXd GpPosterior::cross(const Eigen::Vector2d& z) const {
  Eigen::VectorXd c(static_cast<Eigen::Index>(inputs_.size()));
  for (std::size_t i = 0; i < inputs_.size(); ++i) {
    c(static_cast<Eigen::Index>(i)) = kernel_.rbf(z, inputs_[i]);
  }
  return c;
}

double GpPosterior::mean(double x, double u) const { return cross(scaled(x, u)).dot(weights_); }

Posterior GpPosterior::posterior(double x, double u) const {
  const Eigen::VectorXd c = cross(scaled(x, u));
  const Eigen::VectorXd l = factor_.matrixL().solve(c);
  double var = kernel_.prior_variance() - l.squaredNorm();
  if (var < 0.0) {
    if (var < -1e-12 * (1.0 + kernel_.prior_variance())) {
      throw ContractViolation("GP posterior variance is negative beyond tolerance");
    }
    var = 0.0;
  }
  return {c.dot(weights_), var};
}

GpPosterior gp_fit(const GPState& state) {
  check_state(state);
  const Standardization s = standardization_of(state);
  std::vector<Eigen::Vector2d> z = rescale(s, state.inputs);
  const auto m = static_cast<Eigen::Index>(z.size());

  Eigen::MatrixXd k(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      k(i, j) = state.kernel.rbf(z[i], z[j]);
      k(j, i) = k(i, j);
    }
    k(i, i) += state.kernel.white_var + state.noise_var;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) {
    throw DegenerateDataError("GP kernel matrix is not positive definite");
  }
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(state.outputs.data(), m);
  Eigen::VectorXd w = llt.solve(y);
  if (!w.allFinite()) throw DegenerateDataError("GP weights are not finite");
  return GpPosterior(state.kernel, s.shift, s.scale, std::move(z), std::move(llt), std::move(w));
}

Posterior gp_posterior(const GpPosterior& handle, double x, double u) {
  return handle.posterior(x, u);
}

std::vector<double> sequential_posterior_variances(const GPState& state) {
  check_state(state);
  const std::vector<Eigen::Vector2d> z = rescale(standardization_of(state), state.inputs);
  const auto m = static_cast<Eigen::Index>(z.size());
  const double prior = state.kernel.prior_variance();

  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(m, m);
  std::vector<double> out;
  out.reserve(z.size());
  for (Eigen::Index k = 0; k < m; ++k) {
    double var = prior;
    if (k > 0) {
      Eigen::VectorXd c(k);
      for (Eigen::Index i = 0; i < k; ++i) c(i) = state.kernel.rbf(z[k], z[i]);
      const Eigen::VectorXd l =
          lower.topLeftCorner(k, k).triangularView<Eigen::Lower>().solve(c);
      lower.block(k, 0, 1, k) = l.transpose();
      var = prior - l.squaredNorm();
    }
    var = std::max(var, 0.0);
    const double d2 = var + state.noise_var;
    if (!(d2 > 0.0)) throw DegenerateDataError("GP kernel matrix is not positive definite");
    lower(k, k) = std::sqrt(d2);
    out.push_back(var);
  }
  return out;
}

}  // namespace lba::attack
