#pragma once

#include <cstddef>
#include <span>

#include "lba/plant.hpp"

namespace lba::bounds {

/// Parameters of the scalar deception-probability bounds.
struct ScalarBoundParams {
  double tolerance = 0.1;      // δ
  double beta = 1.0;           // β, inverse fictitious-reading power
  std::size_t learning = 1;    // L
  double half_width = 1.0;     // R, prior support [-R, R]
  double noise_var = 1.0;      // σ²
};

double clip_probability(double p) noexcept;

/// clip(1 - 2/(1 + δβ)^{L/2}, 0, 1): LS deception lower bound.
double deception_lower_bound(const ScalarBoundParams& p);

/// (1 - (Â - Ω)²)/Var W. Throws NonStabilizingError when |Â - Ω| ≥ 1.
double beta_linear(double estimate, double omega, double noise_var);

/// Lower bound with β taken from a stabilizing linear controller.
double deception_lower_bound_linear(double tolerance, double noise_var, double estimate,
                                    double omega, std::size_t learning);

/// Resolution term log₂(R/√(δβ)). Throws OutOfRegimeError unless √(δβ) < R.
double resolution_bits(double half_width, double tolerance, double beta);

/// clip((I + 1)/log₂(R/√(δβ)), 0, 1), with I the mutual information in bits.
double fano_upper_bound(double mutual_info_bits, double half_width, double tolerance,
                        double beta);

/// Gaussian-reference surrogate for the mutual information, in bits:
/// (log₂ e / (2σ²)) Σ_{k=1..L} E[(A x_{k-1} + u_{k-1})²].
double gaussian_information_surrogate(double signal_power_sum, double noise_var);

/// clip(G, 0, 1) with G the Gaussian-KL upper bound. `policy_depends_on_gain`
/// set means the Markov hypothesis fails; that throws ContractViolation.
double g_upper_bound(double signal_power_sum, double noise_var, double half_width,
                     double tolerance, double beta, bool policy_depends_on_gain = false);

/// Σ_{k=1..L} E[(A x_{k-1} + u_{k-1})²] for the loop x_{k+1} = (A - Ω) x_k + w_k
/// started at x_1 = A x_0, x_0 ~ N(0, v0), averaged over the gain prior by
/// adaptive Gauss-Kronrod quadrature.
double expected_signal_power_sum(const plant::GainPrior& prior, double omega, double noise_var,
                                 double initial_var, std::size_t learning);

/// Sample mean of Ψ_k² + 2Ψ_k(a x̄_k + ū_k) with a 99% normal half-width.
struct ConditionEstimate {
  double mean = 0.0;
  double half_width = 0.0;
  std::size_t samples = 0;
  /// mean + half_width < 0
  bool holds() const noexcept { return mean + half_width < 0.0; }
};

/// Throws ContractViolation with fewer than 30 samples.
ConditionEstimate cor2_condition_estimate(std::span<const double> samples);

/// Per-trial ingredients of the vector-case lower bound.
struct VectorTrialTerms {
  bool persistently_exciting = false;
  double noise_state_sum = 0.0;  // Σ_{k<L} ‖w_k x_kᵀ‖_op
  double beta = 1.0;
};

/// ρ · (fraction of trials with (1/(ζL)) Σ‖w xᵀ‖ < √(γβ)).
double vector_lower_bound_estimate(std::span<const VectorTrialTerms> trials, double zeta,
                                   std::size_t learning, double tolerance, double rho);

/// ψ = ½ Σ ln(1 + σ_{k-1}²(z_k)/σ²).
double info_gain_psi(std::span<const double> posterior_vars, double noise_var);

/// min(1, exp(ψ + 1 - ((ν - χ)/(4 σ σ_L))²)). With σ_L = 0 the result is
/// 0 when ν > χ and 1 otherwise.
double gp_confidence_xi(double psi, double chi, double sigma, double posterior_std, double nu);

/// p̄ · Π (1 - ξ_k).
double nonlinear_lower_bound(double p_bar, std::span<const double> xi);

}  // namespace lba::bounds
