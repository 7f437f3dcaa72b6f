#include <doctest.h>

#include <cmath>

#include <Eigen/SVD>

#include "lba/errors.hpp"
#include "lba/linalg.hpp"
#include "lba/random.hpp"
#include "lba/trajectory.hpp"

using namespace lba;

namespace {

Eigen::MatrixXd random_matrix(RandomSource& src, Eigen::Index r, Eigen::Index c) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = src.standard_normal();
  return m;
}

double svd_norm(const Eigen::MatrixXd& m) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("same seed and stream reproduce the sequence") {
  RandomSource a(42, 3), b(42, 3), c(42, 4);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.standard_normal();
    CHECK(x == b.standard_normal());
    if (x != c.standard_normal()) differs = true;
  }
  CHECK(differs);
}

TEST_CASE("derive_seed depends on every index") {
  CHECK(derive_seed(1, 0, 0) != derive_seed(1, 0, 1));
  CHECK(derive_seed(1, 0, 0) != derive_seed(1, 1, 0));
  CHECK(derive_seed(1, 0, 0) != derive_seed(2, 0, 0));
  CHECK(derive_seed(9, 2, 5) == derive_seed(9, 2, 5));
}

TEST_CASE("zero covariance gives the mean exactly") {
  RandomSource src(1, 0);
  const Eigen::VectorXd z = gaussian_sample(src, Eigen::VectorXd::Zero(1), SymmetricMatrix::scalar(0.0));
  CHECK(z(0) == 0.0);
  const Eigen::VectorXd m = gaussian_sample(src, Eigen::Vector2d(1.5, -2), SymmetricMatrix::zero(2));
  CHECK(m(0) == 1.5);
  CHECK(m(1) == -2.0);
}

TEST_CASE("standard normal moments over 1e6 draws") {
  RandomSource src(2024, 0);
  const GaussianSampler s(Eigen::VectorXd::Zero(1), SymmetricMatrix::scalar(1.0));
  const int n = 1000000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = s(src)(0);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 4e-3);
  CHECK(std::abs(var - 1.0) < 0.01);
}

TEST_CASE("correlated sampler reproduces its covariance") {
  Eigen::Matrix2d c;
  c << 2.0, 0.6, 0.6, 1.0;
  const SymmetricMatrix cov(c);
  RandomSource src(5, 1);
  const GaussianSampler s(Eigen::VectorXd::Zero(2), cov);
  Eigen::Matrix2d acc = Eigen::Matrix2d::Zero();
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd x = s(src);
    acc += x * x.transpose();
  }
  acc /= n;
  CHECK((acc - c).cwiseAbs().maxCoeff() < 0.03);
}

TEST_CASE("diagonal sampler equals componentwise scalar draws") {
  RandomSource a(11, 2), b(11, 2);
  const GaussianSampler s(Eigen::Vector2d(0.5, -1.0), SymmetricMatrix::diagonal(Eigen::Vector2d(4.0, 9.0)));
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd x = s(a);
    const double x0 = 0.5 + 2.0 * b.standard_normal();
    const double x1 = -1.0 + 3.0 * b.standard_normal();
    CHECK(x(0) == x0);
    CHECK(x(1) == x1);
  }
}

TEST_CASE("singular PSD covariance samples on its range") {
  Eigen::Matrix2d c;
  c << 1.0, 2.0, 2.0, 4.0;
  RandomSource src(3, 0);
  const GaussianSampler s(Eigen::VectorXd::Zero(2), SymmetricMatrix(c));
  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXd x = s(src);
    CHECK(std::abs(2.0 * x(0) - x(1)) < 1e-9);
  }
}

TEST_CASE("non-PSD covariance names the eigenvalue") {
  RandomSource src(3, 0);
  Eigen::Matrix2d c;
  c << 1.0, 0.0, 0.0, -0.5;
  try {
    gaussian_sample(src, Eigen::VectorXd::Zero(2), SymmetricMatrix(c));
    FAIL("expected ContractViolation");
  } catch (const ContractViolation& e) {
    CHECK(std::string(e.what()).find("-0.5") != std::string::npos);
  }
}

TEST_CASE("symmetric matrix rejects asymmetric input") {
  Eigen::Matrix2d m;
  m << 1.0, 2.0, 0.0, 1.0;
  CHECK_THROWS_AS(SymmetricMatrix{m}, ContractViolation);
  CHECK_THROWS_AS(SymmetricMatrix{Eigen::MatrixXd::Zero(2, 3)}, DimensionError);
}

TEST_CASE("operator norm on fixed cases") {
  CHECK(operator_norm(Eigen::MatrixXd::Identity(3, 3)) == doctest::Approx(1.0));
  CHECK(operator_norm(Eigen::MatrixXd::Identity(7, 7)) == doctest::Approx(1.0));
  CHECK(operator_norm(Eigen::Vector2d(3.0, -4.0).asDiagonal().toDenseMatrix()) == doctest::Approx(4.0));
  CHECK(operator_norm(Eigen::MatrixXd::Zero(2, 2)) == 0.0);
}

TEST_CASE("operator norm matches the SVD oracle") {
  RandomSource src(99, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index r = 1 + trial % 6, c = 1 + (trial / 6) % 6;
    const Eigen::MatrixXd m = random_matrix(src, r, c);
    const double oracle = svd_norm(m);
    CHECK(std::abs(operator_norm(m) - oracle) <= 1e-10 * oracle);
    CHECK(std::abs(operator_norm(m.transpose()) - oracle) <= 1e-10 * oracle);
  }
  const Eigen::MatrixXd m4 = random_matrix(src, 4, 4);
  CHECK(std::abs(operator_norm(m4) - svd_norm(m4)) <= 1e-10 * svd_norm(m4));
}

TEST_CASE("operator norm is sub-multiplicative") {
  RandomSource src(7, 0);
  for (int i = 0; i < 100; ++i) {
    const Eigen::MatrixXd a = random_matrix(src, 3, 3);
    const Eigen::MatrixXd b = random_matrix(src, 3, 3);
    CHECK(operator_norm(a * b) <= operator_norm(a) * operator_norm(b) + 1e-9);
  }
}

TEST_CASE("loewner order") {
  const auto i2 = SymmetricMatrix::identity(2);
  const SymmetricMatrix two(2.0 * Eigen::MatrixXd::Identity(2, 2));
  CHECK(loewner_geq(two, i2));
  CHECK_FALSE(loewner_geq(i2, two));
  Eigen::Matrix2d r1;
  r1 << 1.0, 2.0, 2.0, 4.0;
  CHECK(loewner_geq(SymmetricMatrix(r1), SymmetricMatrix::zero(2)));
  CHECK(is_psd(SymmetricMatrix(r1)));
  CHECK_THROWS_AS(loewner_geq(i2, SymmetricMatrix::identity(3)), DimensionError);
}

TEST_CASE("trajectory conventions") {
  Trajectory t(1);
  t.start(Eigen::VectorXd::Constant(1, 0.3));
  CHECK(t.size() == 1);
  CHECK(t.controls()[0](0) == 0.0);
  CHECK(t.disturbances()[0](0) == 0.0);
  CHECK(t.observations()[0](0) == 0.3);
  const Eigen::VectorXd one = Eigen::VectorXd::Constant(1, 1.0);
  t.push(one, one, one, one, false);
  CHECK_FALSE(t.tampered_through(1));
  t.push(one, one, Eigen::VectorXd::Constant(1, 2.0), one, true);
  CHECK_FALSE(t.tampered_through(1));
  CHECK(t.tampered_through(2));
  CHECK_THROWS_AS(t.push(Eigen::VectorXd::Zero(2), one, one, one, false), DimensionError);
  CHECK_THROWS_AS(Trajectory(0), DimensionError);
}

}  // TEST_SUITE
