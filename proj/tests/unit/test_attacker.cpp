#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "lba/attacker.hpp"
#include "lba/errors.hpp"
#include "lba/plant.hpp"

using namespace lba;
using namespace lba::attack;

TEST_SUITE("attacker") {

TEST_CASE("scalar LS sums") {
  auto s = ls_update_scalar({}, 1.0, 0.0, 0.7);
  CHECK(s.sum_xx == 1.0);
  CHECK(s.sum_cross == doctest::Approx(0.7));
  CHECK(ls_estimate_scalar(ls_update_scalar({}, 2.0, 1.0, 3.0)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(ls_estimate_scalar(ScalarLSState{}), DegenerateDataError);
}

TEST_CASE("noiseless scalar LS is exact") {
  RandomSource src(4, 0);
  ScalarLSState s;
  double x = 1.0;
  for (int k = 0; k < 10; ++k) {
    const double u = src.standard_normal();
    const double next = 0.7 * x + u;
    s = ls_update_scalar(s, x, u, next);
    x = next;
  }
  CHECK(std::abs(ls_estimate_scalar(s) - 0.7) < 1e-8);
}

TEST_CASE("streaming equals batch") {
  RandomSource src(5, 0);
  std::vector<double> xs, us, ns;
  for (int i = 0; i < 40; ++i) {
    xs.push_back(src.standard_normal());
    us.push_back(src.standard_normal());
    ns.push_back(src.standard_normal());
  }
  ScalarLSState stream;
  double bxx = 0.0, bc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    stream = ls_update_scalar(stream, xs[i], us[i], ns[i]);
    bxx += xs[i] * xs[i];
    bc += (ns[i] - us[i]) * xs[i];
  }
  CHECK(stream.count == xs.size());
  CHECK(ls_estimate_scalar(stream) == doctest::Approx(bc / bxx).epsilon(1e-14));

  // Two halves merged by adding the sums.
  ScalarLSState h1, h2;
  for (std::size_t i = 0; i < 20; ++i) h1 = ls_update_scalar(h1, xs[i], us[i], ns[i]);
  for (std::size_t i = 20; i < 40; ++i) h2 = ls_update_scalar(h2, xs[i], us[i], ns[i]);
  CHECK(h1.sum_xx + h2.sum_xx == doctest::Approx(stream.sum_xx).epsilon(1e-14));
  CHECK(h1.sum_cross + h2.sum_cross == doctest::Approx(stream.sum_cross).epsilon(1e-14));
}

TEST_CASE("LS error identity on noisy runs") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    RandomSource src(seed, 0);
    const double a = 1.0, omega = 0.88;
    ScalarLSState s;
    double sum_wx = 0.0, sum_xx = 0.0;
    double x = src.standard_normal();
    for (int k = 0; k < 400; ++k) {
      const double u = -omega * x;
      const double w = src.standard_normal();
      const double next = a * x + u + w;
      s = ls_update_scalar(s, x, u, next);
      sum_wx += w * x;
      sum_xx += x * x;
      x = next;
    }
    CHECK(std::abs((ls_estimate_scalar(s) - a) - sum_wx / sum_xx) < 1e-10);
  }
}

TEST_CASE("vector LS") {
  Eigen::Matrix2d a;
  a << 1, 2, 3, 4;
  SUBCASE("collinear states give the zero matrix") {
    VectorLSState s(2);
    for (int k = 1; k <= 5; ++k) {
      const Eigen::Vector2d x(k, 2.0 * k);
      s = ls_update_vector(s, x, Eigen::Vector2d::Zero(), a * x);
    }
    CHECK(gram_is_singular(s.gram));
    CHECK(ls_estimate_vector(s) == Eigen::MatrixXd::Zero(2, 2));
  }
  SUBCASE("noiseless exciting inputs recover A") {
    RandomSource src(9, 0);
    VectorLSState s(2);
    Eigen::Vector2d x(1, -1);
    for (int k = 0; k < 30; ++k) {
      const Eigen::Vector2d u = -0.9 * a * x + Eigen::Vector2d(src.standard_normal(), src.standard_normal());
      const Eigen::Vector2d next = a * x + u;
      s = ls_update_vector(s, x, u, next);
      x = next;
    }
    CHECK((ls_estimate_vector(s) - a).cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("n = 1 agrees with the scalar estimator") {
    RandomSource src(10, 0);
    VectorLSState v(1);
    ScalarLSState sc;
    double x = 0.5;
    for (int k = 0; k < 25; ++k) {
      const double u = -0.3 * x, next = 0.8 * x + u + src.standard_normal();
      v = ls_update_vector(v, Eigen::VectorXd::Constant(1, x), Eigen::VectorXd::Constant(1, u),
                           Eigen::VectorXd::Constant(1, next));
      sc = ls_update_scalar(sc, x, u, next);
      x = next;
    }
    CHECK(ls_estimate_vector(v)(0, 0) == doctest::Approx(ls_estimate_scalar(sc)).epsilon(1e-12));
  }
}

TEST_CASE("fictitious steps") {
  CHECK(fictitious_step(1.0, 1.0, -1.0, 0.0) == 0.0);

  Eigen::Matrix2d a;
  a << 1, 2, 3, 4;
  // Perfect knowledge and no noise: the fictitious loop is the real loop.
  auto fp = FictitiousPlant::linear(a, SymmetricMatrix::identity(2), Eigen::Vector2d(1, -1));
  plant::VectorPlant real{a, SymmetricMatrix::identity(2), {}};
  Eigen::VectorXd x = Eigen::Vector2d(1, -1);
  for (int k = 0; k < 10; ++k) {
    const Eigen::VectorXd u = -0.9 * a * fp.state();
    const Eigen::VectorXd v = fp.step(u, Eigen::Vector2d::Zero());
    x = plant::step_vector(real, x, u, Eigen::Vector2d::Zero());
    CHECK((v - x).norm() == 0.0);
  }

  auto sc = FictitiousPlant::scalar(0.5, 1.0, 2.0);
  CHECK(sc.state()(0) == 2.0);
  CHECK(sc.step(Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 0.25))(0) == 2.25);
}

TEST_CASE("replay buffer") {
  ReplayBuffer b;
  CHECK_THROWS_AS(b.observation(5), ConfigError);
  for (double v : {1.0, 2.0, 3.0}) b.record(Eigen::VectorXd::Constant(1, v));
  const std::size_t l = 3;
  CHECK(b.observation(l + 1)(0) == 1.0);
  CHECK(b.observation(l + 5)(0) == 2.0);
  CHECK(b.observation(l + 3)(0) == 3.0);
  CHECK_THROWS_AS(b.observation(2), ContractViolation);

  ReplayBuffer one;
  one.record(Eigen::VectorXd::Constant(1, 4.0));
  for (std::size_t k = 2; k < 10; ++k) CHECK(one.observation(k)(0) == 4.0);
}

TEST_CASE("malicious input") {
  const MaliciousActuation mu{MaliciousActuation::Kind::destabilize_gain, 0.5};
  CHECK(malicious_input(mu, 2.0, -7.0) == 1.0);
  CHECK(malicious_input(MaliciousActuation::zero(), 2.0, -7.0) == 0.0);
  CHECK(MaliciousActuation::destabilizing_for(1.0).gain == doctest::Approx(0.5));
  CHECK(std::abs(-0.3 + MaliciousActuation::destabilizing_for(-0.3).gain) == doctest::Approx(1.5));

  // Closed loop x <- x + 0.5 x leaves any bounded region.
  double x = 1.0;
  int k = 0;
  for (; k < 100 && std::abs(x) <= 1e12; ++k) x = x + malicious_input(mu, x, 0.0);
  CHECK(std::abs(x) > 1e12);
}

}  // TEST_SUITE
