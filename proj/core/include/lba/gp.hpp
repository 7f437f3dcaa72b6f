#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace lba::attack {

/// Sum kernel: RBF (length scale ℓ, signal variance s²) plus white noise w².
/// The white term only appears on the diagonal of self-covariances.
struct SumKernel {
  double length_scale = 1.0;
  double signal_var = 1.0;
  double white_var = 0.1;

  double rbf(const Eigen::Vector2d& a, const Eigen::Vector2d& b) const;
  double prior_variance() const noexcept { return signal_var + white_var; }
  void validate() const;
};

/// Training data for GP regression of x_{k+1} on z_k = (x_k, u_k).
struct GPState {
  SumKernel kernel;
  double noise_var = 1.0;
  /// Rescale inputs to zero mean and unit variance per coordinate before fitting.
  bool standardize = false;
  std::vector<Eigen::Vector2d> inputs;
  std::vector<double> outputs;

  void add(double x, double u, double x_next);
  std::size_t size() const noexcept { return inputs.size(); }
};

struct Posterior {
  double mean = 0.0;
  double variance = 0.0;
};

/// Fitted posterior: Cholesky factor of C̄ + σ²I and the weight vector, cached.
class GpPosterior {
 public:
  GpPosterior(SumKernel kernel, Eigen::Vector2d shift, Eigen::Vector2d scale,
              std::vector<Eigen::Vector2d> scaled_inputs, Eigen::LLT<Eigen::MatrixXd> factor,
              Eigen::VectorXd weights);

  double mean(double x, double u) const;
  Posterior posterior(double x, double u) const;
  std::size_t size() const noexcept { return inputs_.size(); }
  const SumKernel& kernel() const noexcept { return kernel_; }

 private:
  Eigen::Vector2d scaled(double x, double u) const;
  Eigen::VectorXd cross(const Eigen::Vector2d& z) const;

  SumKernel kernel_;
  Eigen::Vector2d shift_;
  Eigen::Vector2d scale_;
  std::vector<Eigen::Vector2d> inputs_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
  Eigen::VectorXd weights_;
};

/// Largest learning set accepted by gp_fit.
inline constexpr std::size_t kMaxGpPoints = 2000;

/// Throws DegenerateDataError when C̄ + σ²I is not positive definite.
GpPosterior gp_fit(const GPState& state);

Posterior gp_posterior(const GpPosterior& handle, double x, double u);

/// σ²_{k-1}(z_k) for k = 1..m: predictive variance of each input given the
/// inputs before it, from one incremental Cholesky pass.
std::vector<double> sequential_posterior_variances(const GPState& state);

}  // namespace lba::attack
