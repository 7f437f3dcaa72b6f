#include "lba/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lba/errors.hpp"

namespace lba::bounds {

double clip_probability(double p) noexcept {
  if (std::isnan(p)) return p;
  return std::clamp(p, 0.0, 1.0);
}

double deception_lower_bound(const ScalarBoundParams& p) {
  if (!(p.tolerance > 0.0) || !(p.beta > 0.0) || p.learning < 1) {
    throw ContractViolation("deception_lower_bound needs delta > 0, beta > 0, L >= 1");
  }
  const double half_l = 0.5 * static_cast<double>(p.learning);
  const double tail = 2.0 * std::exp(-half_l * std::log1p(p.tolerance * p.beta));
  return clip_probability(1.0 - tail);
}

double beta_linear(double estimate, double omega, double noise_var) {
  const double gap = estimate - omega;
  if (!(std::abs(gap) < 1.0)) {
    std::ostringstream msg;
    msg << "controller does not stabilize the fictitious loop (|A_hat - Omega| = "
        << std::abs(gap) << ")";
    throw NonStabilizingError(msg.str());
  }
  if (!(noise_var > 0.0)) throw ContractViolation("beta_linear needs noise variance > 0");
  return (1.0 - gap * gap) / noise_var;
}

double deception_lower_bound_linear(double tolerance, double noise_var, double estimate,
                                    double omega, std::size_t learning) {
  ScalarBoundParams p;
  p.tolerance = tolerance;
  p.beta = beta_linear(estimate, omega, noise_var);
  p.learning = learning;
  p.noise_var = noise_var;
  return deception_lower_bound(p);
}

double resolution_bits(double half_width, double tolerance, double beta) {
  const double radius = std::sqrt(tolerance * beta);
  if (!(radius < half_width)) {
    std::ostringstream msg;
    msg << "sqrt(delta*beta) = " << radius << " is not below the prior half-width " << half_width;
    throw OutOfRegimeError(msg.str());
  }
  return std::log2(half_width / radius);
}

double fano_upper_bound(double mutual_info_bits, double half_width, double tolerance,
                        double beta) {
  if (!(mutual_info_bits >= 0.0)) throw ContractViolation("mutual information must be >= 0");
  return clip_probability((mutual_info_bits + 1.0) / resolution_bits(half_width, tolerance, beta));
}

double gaussian_information_surrogate(double signal_power_sum, double noise_var) {
  if (!(noise_var > 0.0)) throw ContractViolation("information surrogate needs noise variance > 0");
  return std::numbers::log2e / (2.0 * noise_var) * signal_power_sum;
}

double g_upper_bound(double signal_power_sum, double noise_var, double half_width,
                     double tolerance, double beta, bool policy_depends_on_gain) {
  if (policy_depends_on_gain) {
    throw ContractViolation("G upper bound requires a control policy that does not depend on the gain");
  }
  return fano_upper_bound(gaussian_information_surrogate(signal_power_sum, noise_var), half_width,
                          tolerance, beta);
}

namespace {

double signal_power_sum_at(double a, double omega, double noise_var, double initial_var,
                           std::size_t learning) {
  if (learning == 0) return 0.0;
  const double g2 = (a - omega) * (a - omega);
  double var = a * a * initial_var;  // Var x_1
  double total = var;                // k = 1: E[(A x_0)^2]
  for (std::size_t k = 2; k <= learning; ++k) {
    total += g2 * var;
    var = g2 * var + noise_var;
  }
  return total;
}

}  // namespace

double expected_signal_power_sum(const plant::GainPrior& prior, double omega, double noise_var,
                                 double initial_var, std::size_t learning) {
  prior.validate();
  if (prior.kind == plant::GainPrior::Kind::fixed) {
    return signal_power_sum_at(prior.value, omega, noise_var, initial_var, learning);
  }
  const double r = prior.half_width;
  auto f = [&](double a) { return signal_power_sum_at(a, omega, noise_var, initial_var, learning); };
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -r, r, 15, 1e-12);
  return integral / (2.0 * r);
}

ConditionEstimate cor2_condition_estimate(std::span<const double> samples) {
  if (samples.size() < 30) {
    throw ContractViolation("condition estimate needs at least 30 samples, got " +
                            std::to_string(samples.size()));
  }
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= n;
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  constexpr double kZ99 = 2.5758293035489004;
  return {mean, kZ99 * sd / std::sqrt(n), samples.size()};
}

double vector_lower_bound_estimate(std::span<const VectorTrialTerms> trials, double zeta,
                                   std::size_t learning, double tolerance, double rho) {
  if (trials.empty()) throw ContractViolation("vector lower bound over zero trials");
  if (!(zeta > 0.0) || learning < 1 || !(tolerance > 0.0)) {
    throw ContractViolation("vector lower bound needs zeta > 0, L >= 1, gamma > 0");
  }
  if (!(rho >= 0.0 && rho <= 1.0)) throw ContractViolation("rho must lie in [0, 1]");
  std::size_t hits = 0;
  for (const auto& t : trials) {
    const double err = t.noise_state_sum / (zeta * static_cast<double>(learning));
    if (t.beta > 0.0 && err < std::sqrt(tolerance * t.beta)) ++hits;
  }
  return rho * static_cast<double>(hits) / static_cast<double>(trials.size());
}

double info_gain_psi(std::span<const double> posterior_vars, double noise_var) {
  if (!(noise_var > 0.0)) throw ContractViolation("info gain needs noise variance > 0");
  double psi = 0.0;
  for (double v : posterior_vars) {
    if (v < 0.0) throw ContractViolation("negative posterior variance");
    psi += std::log1p(v / noise_var);
  }
  return 0.5 * psi;
}

double gp_confidence_xi(double psi, double chi, double sigma, double posterior_std, double nu) {
  if (!(posterior_std > 0.0)) return nu > chi ? 0.0 : 1.0;
  const double z = (nu - chi) / (4.0 * sigma * posterior_std);
  return std::min(1.0, std::exp(psi + 1.0 - z * z));
}

double nonlinear_lower_bound(double p_bar, std::span<const double> xi) {
  double prod = p_bar;
  for (double x : xi) prod *= (1.0 - x);
  return clip_probability(prod);
}

}  // namespace lba::bounds
