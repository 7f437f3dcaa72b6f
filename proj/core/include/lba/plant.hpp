#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "lba/linalg.hpp"
#include "lba/random.hpp"

namespace lba::plant {

/// Trials whose true state exceeds this magnitude are marked diverged.
inline constexpr double kDivergenceThreshold = 1e12;

/// X_{k+1} = a X_k + U_k + W_k with W_k ~ N(0, noise_var).
struct ScalarPlant {
  double gain = 1.0;
  double noise_var = 1.0;
  /// Variance of the zero-mean Gaussian X_0. Unset means "use noise_var".
  std::optional<double> initial_var;

  double x0_variance() const { return initial_var.value_or(noise_var); }
  void validate() const;
};

/// x_{k+1} = A x_k + u_k + w_k with w_k ~ N(0, Σ).
struct VectorPlant {
  Eigen::MatrixXd gain;
  SymmetricMatrix noise_cov;
  std::optional<SymmetricMatrix> initial_cov;

  Eigen::Index dim() const noexcept { return gain.rows(); }
  const SymmetricMatrix& x0_covariance() const { return initial_cov ? *initial_cov : noise_cov; }
  void validate() const;
};

/// Deterministic dynamics f(x, u) from the closed registry.
using DynamicsFn = double (*)(double x, double u);

struct Dynamics {
  std::string name;
  DynamicsFn fn = nullptr;
  double operator()(double x, double u) const { return fn(x, u); }
};

/// Looks up a registered dynamics map; throws ConfigError on a miss.
Dynamics find_dynamics(std::string_view name);
std::vector<std::string> dynamics_names();

/// X_{k+1} = f(X_k, U_k) + W_k.
struct NonlinearPlant {
  Dynamics dynamics;
  double noise_var = 1.0;
  double rkhs_norm_bound = 1.0;
  std::optional<double> initial_var;

  double x0_variance() const { return initial_var.value_or(noise_var); }
  void validate() const;
};

/// Prior over the scalar open-loop gain.
struct GainPrior {
  enum class Kind { fixed, uniform };
  Kind kind = Kind::fixed;
  double value = 1.0;       // fixed kind
  double half_width = 1.0;  // uniform kind: support [-R, R]

  static GainPrior fixed(double a) { return {Kind::fixed, a, 1.0}; }
  static GainPrior uniform(double r) { return {Kind::uniform, 0.0, r}; }
  void validate() const;
};

double step_scalar(const ScalarPlant& p, double x, double u, double w);
Eigen::VectorXd step_vector(const VectorPlant& p, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& u, const Eigen::VectorXd& w);
double step_nonlinear(const NonlinearPlant& p, double x, double u, double w);

double sample_gain(const GainPrior& prior, RandomSource& src);

}  // namespace lba::plant
