#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "lba/linalg.hpp"

namespace lba {

/// SplitMix64 finalizer. Used for every seed derivation in the library.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of trial `trial` at sweep grid point `grid`. Depends only on the
/// indices, so any trial can be replayed in isolation.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t grid, std::uint64_t trial) noexcept;

/// Deterministic stream of random draws, owned by exactly one trial.
///
/// Two sources built from the same (seed, stream) pair produce bit-identical
/// sequences. Distinct stream ids go through independent SplitMix64 mixing
/// before seeding the engine.
class RandomSource {
 public:
  RandomSource(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// Standard normal draw.
  double standard_normal() { return normal_(engine_); }
  /// Draw from N(mean, variance); variance must be nonnegative.
  double normal(double mean, double variance);
  /// Draw from Uniform[lo, hi].
  double uniform(double lo, double hi);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Multivariate normal sampler with a precomputed factor of the covariance.
///
/// Diagonal covariances are sampled componentwise, so a diagonal sampler and
/// n scalar `RandomSource::normal` calls on the same stream agree exactly.
class GaussianSampler {
 public:
  GaussianSampler(Eigen::VectorXd mean, const SymmetricMatrix& cov);

  Eigen::VectorXd operator()(RandomSource& src) const;
  Eigen::Index dim() const noexcept { return mean_.size(); }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd factor_;
  Eigen::VectorXd diag_std_;
  bool diagonal_ = false;
};

/// One draw from N(mean, cov). Throws ContractViolation naming the offending
/// eigenvalue when cov is not positive semidefinite.
Eigen::VectorXd gaussian_sample(RandomSource& src, const Eigen::VectorXd& mean,
                                const SymmetricMatrix& cov);

}  // namespace lba
