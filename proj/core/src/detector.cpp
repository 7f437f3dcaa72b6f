#include "lba/detector.hpp"

#include <cmath>

#include "lba/errors.hpp"

namespace lba::detect {

namespace {

void validate_window(double tolerance, std::size_t test_time, const char* name) {
  if (!(tolerance > 0.0) || !std::isfinite(tolerance)) {
    throw ConfigError(std::string(name) + " tolerance must be finite and > 0");
  }
  if (test_time < 1) throw ConfigError(std::string(name) + " test time must be >= 1");
}

void require_count(const ResidualAccumulator& acc, std::size_t test_time) {
  if (acc.count() != test_time) {
    throw ContractViolation("test run on " + std::to_string(acc.count()) +
                            " residuals, expected " + std::to_string(test_time));
  }
}

}  // namespace

void VarianceTestConfig::validate() const { validate_window(tolerance, test_time, "variance test"); }

void CovarianceTestConfig::validate() const {
  validate_window(tolerance, test_time, "covariance test");
}

ResidualAccumulator::ResidualAccumulator(Eigen::Index dim)
    : outer_(Eigen::MatrixXd::Zero(dim, dim)) {
  if (dim < 1) throw DimensionError("residual dimension must be >= 1");
}

void ResidualAccumulator::add(double r) {
  if (dim() != 1) throw DimensionError("scalar residual added to a vector accumulator");
  outer_(0, 0) += r * r;
  sum_squares_ += r * r;
  ++count_;
}

void ResidualAccumulator::add(const Eigen::VectorXd& r) {
  if (r.size() != dim()) throw DimensionError("residual has wrong dimension");
  outer_.noalias() += r * r.transpose();
  sum_squares_ += r.squaredNorm();
  ++count_;
}

double residual_scalar(double gain, double y_next, double y, double u) {
  return y_next - gain * y - u;
}

Eigen::VectorXd residual_vector(const Eigen::MatrixXd& gain, const Eigen::VectorXd& y_next,
                                const Eigen::VectorXd& y, const Eigen::VectorXd& u) {
  if (gain.rows() != y.size() || gain.cols() != y.size() || y_next.size() != y.size() ||
      u.size() != y.size()) {
    throw DimensionError("residual_vector: dimension mismatch");
  }
  return y_next - gain * y - u;
}

double residual_nonlinear(const plant::Dynamics& f, double y_next, double y, double u) {
  return y_next - f(y, u);
}

Verdict variance_test(const ResidualAccumulator& acc, double noise_var,
                      const VarianceTestConfig& cfg) {
  require_count(acc, cfg.test_time);
  Verdict v;
  v.statistic = acc.sum_squares() / static_cast<double>(cfg.test_time);
  v.lower = noise_var - cfg.tolerance;
  v.upper = noise_var + cfg.tolerance;
  v.alarm = !(v.lower < v.statistic && v.statistic < v.upper);
  return v;
}

Verdict covariance_test(const ResidualAccumulator& acc, const SymmetricMatrix& noise_cov,
                        const CovarianceTestConfig& cfg) {
  if (noise_cov.dim() != acc.dim()) {
    throw DimensionError("covariance test: noise covariance is " + std::to_string(noise_cov.dim()) +
                         "-dimensional, residuals are " + std::to_string(acc.dim()));
  }
  require_count(acc, cfg.test_time);
  const Eigen::MatrixXd delta =
      noise_cov.matrix() - acc.sum_outer() / static_cast<double>(cfg.test_time);
  Verdict v;
  v.statistic = operator_norm(delta);
  v.lower = 0.0;
  v.upper = cfg.tolerance;
  v.alarm = v.statistic > cfg.tolerance;
  return v;
}

double false_alarm_bound(double noise_var, double tolerance, std::size_t test_time) {
  if (!(tolerance > 0.0) || test_time < 1) {
    throw ContractViolation("false_alarm_bound needs tolerance > 0 and T >= 1");
  }
  const double raw = 3.0 * noise_var * noise_var /
                     (tolerance * tolerance * static_cast<double>(test_time));
  return std::min(1.0, raw);
}

SymmetricMatrix state_gram(std::span<const Eigen::VectorXd> states) {
  if (states.empty()) throw ContractViolation("state_gram on an empty span");
  const Eigen::Index n = states.front().size();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (const auto& x : states) {
    if (x.size() != n) throw DimensionError("state_gram: inconsistent state dimensions");
    g.noalias() += x * x.transpose();
  }
  return SymmetricMatrix(0.5 * (g + g.transpose()));
}

bool persistent_excitation_check(std::span<const Eigen::VectorXd> states, double zeta) {
  if (!(zeta > 0.0)) throw ContractViolation("persistent excitation needs zeta > 0");
  const SymmetricMatrix g = state_gram(states);
  const SymmetricMatrix avg(g.matrix() / static_cast<double>(states.size()));
  return loewner_geq(avg, SymmetricMatrix(zeta * Eigen::MatrixXd::Identity(g.dim(), g.dim())));
}

}  // namespace lba::detect
