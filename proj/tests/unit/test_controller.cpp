#include <doctest.h>

#include <cmath>
#include <vector>

#include "lba/controller.hpp"
#include "lba/errors.hpp"

using namespace lba;
using namespace lba::control;

TEST_SUITE("controller") {

TEST_CASE("control actions") {
  CHECK(control_action(ControlPolicy::linear(0.88), 2.0) == doctest::Approx(-1.76));
  CHECK(control_action(ControlPolicy::zero(), 5.0) == 0.0);
  CHECK(control_action(ControlPolicy::quadratic(1.1), 2.0) == doctest::Approx(-4.4));

  Eigen::Matrix2d a;
  a << 1, 2, 3, 4;
  const Eigen::VectorXd u = control_action(ControlPolicy::matrix(0.9 * a), Eigen::Vector2d(1, 0));
  CHECK(u(0) == doctest::Approx(-0.9));
  CHECK(u(1) == doctest::Approx(-2.7));
  CHECK_THROWS_AS(control_action(ControlPolicy::matrix(a), Eigen::Vector3d(1, 0, 0)), DimensionError);
  CHECK_THROWS_AS(control_action(ControlPolicy::linear(1.0), Eigen::Vector2d(1, 0)), DimensionError);
}

TEST_CASE("privacy signal kinds") {
  RandomSource src(1, 0);
  AuthenticatedPolicyState st(1.0);
  CHECK(privacy_signal_next(PrivacySignalSpec::none(), st, 1.0, 3.0, 0.0, src) == 0.0);

  const auto iid = PrivacySignalSpec::iid(9.0);
  double sq = 0.0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    const double g = privacy_signal_next(iid, st, 1.0, 0.0, 0.0, src);
    sq += g * g;
  }
  CHECK(std::abs(sq / n - 9.0) < 0.02 * 9.0);
}

TEST_CASE("recursive signal hits its target") {
  RandomSource src(1, 0);
  AuthenticatedPolicyState st(1.0);
  const auto spec = PrivacySignalSpec::recursive(3.0);
  const double g1 = privacy_signal_next(spec, st, 1.0, 3.0, 0.0, src);
  CHECK(g1 == doctest::Approx(-1.0));
  authenticated_action(st, 0.0, g1);
  CHECK(st.psi() == doctest::Approx(-1.0));

  // Later steps: Ψ_k = -(a x̄_k + ū_k)/η for any a.
  AuthenticatedPolicyState s2(0.7);
  const std::vector<std::pair<double, double>> path{{1.0, -0.5}, {-2.0, 1.0}, {0.3, 0.1}};
  for (const auto& [xbar, ubar] : path) {
    const double g = privacy_signal_next(spec, s2, 0.7, xbar, ubar, src);
    authenticated_action(s2, ubar, g);
    CHECK(s2.psi() == doctest::Approx(-(0.7 * xbar + ubar) / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("eta below 3 is a configuration error unless allowed") {
  CHECK_THROWS_AS(PrivacySignalSpec::recursive(2.0).validate(), ConfigError);
  CHECK_NOTHROW(PrivacySignalSpec::recursive(2.0, true).validate());
  CHECK_NOTHROW(PrivacySignalSpec::recursive(3.0).validate());
  CHECK_THROWS_AS(PrivacySignalSpec::iid(-1.0).validate(), ConfigError);
  Eigen::Matrix2d bad;
  bad << 1, 0, 0, -1;
  CHECK_THROWS_AS(PrivacySignalSpec::iid_vector(SymmetricMatrix(bad)).validate(), ConfigError);
}

TEST_CASE("authenticated action") {
  AuthenticatedPolicyState st(1.0);
  CHECK(authenticated_action(st, -1.76, 0.0) == -1.76);
  CHECK(authenticated_action(st, 2.0, -0.5) == 1.5);

  AuthenticatedPolicyState half(0.5);
  authenticated_action(half, 0.0, 1.0);
  authenticated_action(half, 0.0, 1.0);
  CHECK(half.psi() == doctest::Approx(1.5));
}

TEST_CASE("psi recurrence matches the explicit sum") {
  RandomSource src(31, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const double a = src.uniform(-2.0, 2.0);
    AuthenticatedPolicyState st(a);
    for (int k = 0; k < 1000; ++k) authenticated_action(st, 0.0, src.standard_normal());
    // Horner evaluation of Σ a^{k-j} Γ_j.
    double direct = 0.0;
    for (double g : st.signals()) direct = a * direct + g;
    CHECK(std::abs(st.psi() - direct) < 1e-9 * (1.0 + std::abs(st.psi())));
  }
}

TEST_CASE("controller without privacy equals the base action") {
  RandomSource src(2, 0);
  Controller c(ControlPolicy::linear(0.88), PrivacySignalSpec::none(), 1.0, 1);
  for (double y : {-3.0, 0.0, 0.123456789, 17.0}) {
    CHECK(c.act(Eigen::VectorXd::Constant(1, y), src)(0) == control_action(ControlPolicy::linear(0.88), y));
  }
}

TEST_CASE("recursive controller runs on the twin state") {
  // With x̄ tracked as y - Ψ, the condition term is (1/η² - 2/η)(a x̄ + ū)².
  RandomSource src(2, 0);
  const double a = 1.0, eta = 5.0;
  Controller c(ControlPolicy::linear(0.5), PrivacySignalSpec::recursive(eta), a, 1);
  double x = 1.0, xbar = 1.0;
  for (int k = 0; k < 50; ++k) {
    const double ubar = -0.5 * xbar;
    const double u = c.act(Eigen::VectorXd::Constant(1, x), src)(0);
    const double drive = a * xbar + ubar;
    CHECK(*c.last_condition_term() == doctest::Approx((1.0 / (eta * eta) - 2.0 / eta) * drive * drive));
    const double w = src.standard_normal();
    x = a * x + u + w;
    xbar = a * xbar + ubar + w;
    CHECK(x - xbar == doctest::Approx(c.state().psi()).epsilon(1e-9));
  }
}

TEST_CASE("lq cost") {
  Trajectory t(1);
  t.start(Eigen::VectorXd::Zero(1));
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  t.push(one, one, one, Eigen::VectorXd::Zero(1), false);
  t.push(one, one, one, Eigen::VectorXd::Zero(1), false);
  CHECK(lq_cost(t, {1.0, 1.0}, 2) == doctest::Approx(2.0));
  CHECK(lq_cost(t, {0.0, 0.0}, 2) == 0.0);

  Trajectory z(1);
  z.start(Eigen::VectorXd::Zero(1));
  z.push(Eigen::VectorXd::Zero(1), one, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1), false);
  CHECK(lq_cost(z, {1.0, 0.0}, 1) == 0.0);
  CHECK_THROWS_AS(lq_cost(z, {1.0, 1.0}, 5), ContractViolation);
  CHECK_THROWS_AS((LQWeights{-1.0, 1.0}).validate(), ConfigError);
}

}  // TEST_SUITE
