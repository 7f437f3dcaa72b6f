#include "lba/plant.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "lba/errors.hpp"

namespace lba::plant {

namespace {

double quadratic_sine(double x, double u) { return x * x + std::sin(x) + u; }
double sine(double x, double u) { return std::sin(x) + u; }
double damped_tanh(double x, double u) { return 0.9 * std::tanh(x) + u; }

struct Entry {
  const char* name;
  DynamicsFn fn;
};

constexpr std::array<Entry, 3> kRegistry{{
    {"quadratic-sine", &quadratic_sine},
    {"sine", &sine},
    {"damped-tanh", &damped_tanh},
}};

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ConfigError(std::string(what) + " must be finite");
}

}  // namespace

Dynamics find_dynamics(std::string_view name) {
  const auto it = std::find_if(kRegistry.begin(), kRegistry.end(),
                               [&](const Entry& e) { return name == e.name; });
  if (it == kRegistry.end()) {
    throw ConfigError("unknown dynamics '" + std::string(name) + "'");
  }
  return {it->name, it->fn};
}

std::vector<std::string> dynamics_names() {
  std::vector<std::string> names;
  for (const auto& e : kRegistry) names.emplace_back(e.name);
  return names;
}

void ScalarPlant::validate() const {
  require_finite(gain, "plant gain");
  if (!(noise_var >= 0.0)) throw ConfigError("noise variance must be >= 0");
  if (initial_var && !(*initial_var >= 0.0)) throw ConfigError("initial variance must be >= 0");
}

void VectorPlant::validate() const {
  if (gain.rows() != gain.cols() || gain.rows() < 1) {
    throw ConfigError("gain matrix must be square and nonempty");
  }
  if (!gain.allFinite()) throw ConfigError("gain matrix must be finite");
  if (noise_cov.dim() != gain.rows()) throw ConfigError("noise covariance dimension mismatch");
  if (!is_psd(noise_cov)) throw ConfigError("noise covariance must be positive semidefinite");
  if (initial_cov) {
    if (initial_cov->dim() != gain.rows()) throw ConfigError("initial covariance dimension mismatch");
    if (!is_psd(*initial_cov)) throw ConfigError("initial covariance must be positive semidefinite");
  }
}

void NonlinearPlant::validate() const {
  if (dynamics.fn == nullptr) throw ConfigError("nonlinear plant has no dynamics");
  if (!(noise_var >= 0.0)) throw ConfigError("noise variance must be >= 0");
  if (!(rkhs_norm_bound > 0.0)) throw ConfigError("RKHS norm bound must be > 0");
  if (initial_var && !(*initial_var >= 0.0)) throw ConfigError("initial variance must be >= 0");
}

void GainPrior::validate() const {
  if (kind == Kind::fixed) {
    require_finite(value, "fixed gain");
  } else if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw ConfigError("uniform prior half-width must be finite and > 0");
  }
}

double step_scalar(const ScalarPlant& p, double x, double u, double w) {
  return p.gain * x + u + w;
}

Eigen::VectorXd step_vector(const VectorPlant& p, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& u, const Eigen::VectorXd& w) {
  const Eigen::Index n = p.dim();
  if (x.size() != n || u.size() != n || w.size() != n) {
    throw DimensionError("step_vector: expected vectors of dimension " + std::to_string(n));
  }
  return p.gain * x + u + w;
}

double step_nonlinear(const NonlinearPlant& p, double x, double u, double w) {
  return p.dynamics(x, u) + w;
}

double sample_gain(const GainPrior& prior, RandomSource& src) {
  if (prior.kind == GainPrior::Kind::fixed) return prior.value;
  return src.uniform(-prior.half_width, prior.half_width);
}

}  // namespace lba::plant
