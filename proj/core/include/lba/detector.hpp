#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "lba/linalg.hpp"
#include "lba/plant.hpp"

namespace lba::detect {

/// Variance test: no alarm iff (1/T) Σ r_k² ∈ (σ² - δ, σ² + δ).
struct VarianceTestConfig {
  double tolerance = 0.1;  // δ
  std::size_t test_time = 1;
  void validate() const;
};

/// Covariance test: no alarm iff ‖Σ - (1/T) Σ r rᵀ‖_op ≤ γ.
struct CovarianceTestConfig {
  double tolerance = 0.1;  // γ
  std::size_t test_time = 1;
  void validate() const;
};

/// Running Σ r rᵀ (and its trace, Σ r² in the scalar case).
class ResidualAccumulator {
 public:
  explicit ResidualAccumulator(Eigen::Index dim = 1);

  void add(double r);
  void add(const Eigen::VectorXd& r);

  Eigen::Index dim() const noexcept { return outer_.rows(); }
  std::size_t count() const noexcept { return count_; }
  double sum_squares() const noexcept { return sum_squares_; }
  const Eigen::MatrixXd& sum_outer() const noexcept { return outer_; }

 private:
  Eigen::MatrixXd outer_;
  double sum_squares_ = 0.0;
  std::size_t count_ = 0;
};

struct Verdict {
  bool alarm = false;
  double statistic = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

double residual_scalar(double gain, double y_next, double y, double u);
Eigen::VectorXd residual_vector(const Eigen::MatrixXd& gain, const Eigen::VectorXd& y_next,
                                const Eigen::VectorXd& y, const Eigen::VectorXd& u);
double residual_nonlinear(const plant::Dynamics& f, double y_next, double y, double u);

/// Open interval. Throws ContractViolation when count != T.
Verdict variance_test(const ResidualAccumulator& acc, double noise_var,
                      const VarianceTestConfig& cfg);

/// Closed bound ‖Δ‖_op ≤ γ. Throws ContractViolation when count != T and
/// DimensionError when Σ does not match the residual dimension.
Verdict covariance_test(const ResidualAccumulator& acc, const SymmetricMatrix& noise_cov,
                        const CovarianceTestConfig& cfg);

/// Chebyshev bound min(1, 3σ⁴/(δ²T)) on the variance-test false-alarm rate.
double false_alarm_bound(double noise_var, double tolerance, std::size_t test_time);

/// G_τ = Σ_{k=1..τ} x_k x_kᵀ.
SymmetricMatrix state_gram(std::span<const Eigen::VectorXd> states);

/// (1/τ) G_τ ⪰ ζ I.
bool persistent_excitation_check(std::span<const Eigen::VectorXd> states, double zeta);

}  // namespace lba::detect
