#include "lba/random.hpp"

#include <cmath>
#include <sstream>

#include "lba/errors.hpp"

namespace lba {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t grid, std::uint64_t trial) noexcept {
  return splitmix64(splitmix64(splitmix64(base) ^ grid) ^ trial);
}

RandomSource::RandomSource(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(splitmix64(seed ^ splitmix64(~stream))) {}

double RandomSource::normal(double mean, double variance) {
  if (!(variance >= 0.0)) {
    throw ContractViolation("normal draw with negative variance");
  }
  const double z = standard_normal();
  return mean + std::sqrt(variance) * z;
}

double RandomSource::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

GaussianSampler::GaussianSampler(Eigen::VectorXd mean, const SymmetricMatrix& cov)
    : mean_(std::move(mean)) {
  const Eigen::Index n = cov.dim();
  if (mean_.size() != n) {
    throw DimensionError("gaussian: mean has dimension " + std::to_string(mean_.size()) +
                         ", covariance " + std::to_string(n));
  }
  const Eigen::VectorXd eig = cov.eigenvalues();
  if (n > 0 && eig(0) < -psd_tolerance(std::abs(cov.trace()))) {
    std::ostringstream msg;
    msg << "gaussian: covariance is not positive semidefinite (eigenvalue " << eig(0) << ")";
    throw ContractViolation(msg.str());
  }

  const Eigen::MatrixXd& m = cov.matrix();
  diagonal_ = (m - Eigen::MatrixXd(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
  if (n == 0 || diagonal_) {
    diagonal_ = true;
    diag_std_ = m.diagonal().cwiseMax(0.0).cwiseSqrt();
    return;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) {
    factor_ = llt.matrixL();
  } else {
    // Singular PSD: symmetric square root.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    factor_ = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }
}

Eigen::VectorXd GaussianSampler::operator()(RandomSource& src) const {
  const Eigen::Index n = mean_.size();
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = src.standard_normal();
  if (diagonal_) return mean_ + diag_std_.cwiseProduct(z);
  return mean_ + factor_ * z;
}

Eigen::VectorXd gaussian_sample(RandomSource& src, const Eigen::VectorXd& mean,
                                const SymmetricMatrix& cov) {
  return GaussianSampler(mean, cov)(src);
}

}  // namespace lba
