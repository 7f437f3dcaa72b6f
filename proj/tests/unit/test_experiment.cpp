#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lba/config.hpp"
#include "lba/errors.hpp"
#include "lba/experiment.hpp"
#include "lba/report.hpp"

using namespace lba;
using namespace lba::harness;

namespace {

KeyValueConfig scalar_ls(std::size_t l, std::size_t t) {
  auto kv = KeyValueConfig::parse(R"(
[plant]
kind = scalar
gain = 1
noise_var = 1
[controller]
policy = linear
gain = 0.88
[attack]
kind = ls
[detector]
test = variance
tolerance = 0.1
[sweep]
seed = 5
)");
  kv.set("attack.learning_length", std::to_string(l));
  kv.set("detector.test_time", std::to_string(t));
  return kv;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("rate estimates") {
  std::vector<TrialOutcome> all(10);
  for (auto& o : all) o.deceived = true;
  auto r = rate_of(all, true);
  CHECK(r.rate == 1.0);
  CHECK(r.std_error == 0.0);

  std::vector<TrialOutcome> half(500);
  for (std::size_t i = 0; i < half.size(); i += 2) half[i].deceived = true;
  r = rate_of(half, true);
  CHECK(r.rate == 0.5);
  CHECK(r.std_error == doctest::Approx(0.02236).epsilon(1e-3));

  std::vector<TrialOutcome> none(3);
  for (auto& o : none) o.valid = false;
  CHECK_THROWS_AS(rate_of(none, true), Error);
}

TEST_CASE("noiseless learning gives the exact gain") {
  auto kv = scalar_ls(5, 2000);
  kv.set("plant.learning_noise_var", "0");
  kv.set("detector.tolerance", "0.5");
  const auto cfg = build_experiment(kv);
  for (std::size_t i = 0; i < 10; ++i) {
    const auto o = run_trial(cfg, i);
    REQUIRE(o.valid);
    REQUIRE(o.estimate);
    CHECK(std::abs((*o.estimate)(0, 0) - 1.0) < 1e-12);
    CHECK_FALSE(o.alarm);
    CHECK(o.deceived);
  }
}

TEST_CASE("trajectory bookkeeping") {
  const auto cfg = build_experiment(scalar_ls(20, 100));
  const auto o = run_trial(cfg, 0, 0, TrialOptions{true});
  REQUIRE(o.trajectory);
  const auto& tr = *o.trajectory;
  CHECK(tr.size() == 101);
  CHECK(tr.controls()[0](0) == 0.0);
  CHECK(tr.disturbances()[0](0) == 0.0);
  for (std::size_t k = 0; k <= 20; ++k) {
    CHECK(tr.observations()[k] == tr.states()[k]);
    CHECK_FALSE(tr.hijacked()[k]);
  }
  for (std::size_t k = 21; k <= 100; ++k) CHECK(tr.hijacked()[k]);
  CHECK_FALSE(tr.tampered_through(20));
  CHECK(tr.tampered_through(100));
  CHECK(o.hijacked);
  CHECK(o.deceived == (o.hijacked && !o.alarm));
}

TEST_CASE("legitimate residuals equal the disturbances") {
  auto kv = scalar_ls(20, 300);
  kv.set("attack.kind", "none");
  kv.erase("attack.learning_length");
  const auto cfg = build_experiment(kv);
  const auto o = run_trial(cfg, 2, 0, TrialOptions{true});
  REQUIRE(o.trajectory);
  const auto& tr = *o.trajectory;
  double sum = 0.0;
  for (std::size_t k = 1; k < tr.size() - 1; ++k) {
    const double r = tr.observations()[k + 1](0) - tr.observations()[k](0) - tr.controls()[k](0);
    CHECK(std::abs(r - tr.disturbances()[k](0)) < 1e-9 * (1.0 + std::abs(tr.states()[k + 1](0))));
    sum += r * r;
  }
  // The last residual needs y_{T+1}, which is not stored; it equals w_T.
  const std::size_t t = tr.size() - 1;
  const double last = tr.disturbances()[t](0);
  CHECK(o.statistic == doctest::Approx((sum + last * last) / static_cast<double>(t)).epsilon(1e-9));
  CHECK_FALSE(o.hijacked);
  CHECK(std::isfinite(o.lq_cost));
}

TEST_CASE("determinism and thread independence") {
  const auto cfg = build_experiment(scalar_ls(20, 200));
  const auto a = monte_carlo(cfg, 40, 1);
  const auto b = monte_carlo(cfg, 40, 4);
  REQUIRE(a.outcomes.size() == b.outcomes.size());
  for (std::size_t i = 0; i < a.outcomes.size(); ++i) {
    CHECK(a.outcomes[i].seed == b.outcomes[i].seed);
    CHECK(a.outcomes[i].statistic == b.outcomes[i].statistic);
    CHECK(a.outcomes[i].deceived == b.outcomes[i].deceived);
  }
  CHECK(a.rate.rate == b.rate.rate);
  CHECK(run_trial(cfg, 7).statistic == run_trial(cfg, 7).statistic);
  CHECK(run_trial(cfg, 7).seed != run_trial(cfg, 8).seed);
}

TEST_CASE("sweep report is reproducible") {
  auto kv = scalar_ls(20, 200);
  kv.set("sweep.axis", "attack.learning_length");
  kv.set("sweep.values", "8 20");
  kv.set("sweep.trials", "30");
  std::ostringstream a, b;
  write_csv(sweep(kv), a);
  kv.set("sweep.threads", "3");
  write_csv(sweep(kv), b);
  CHECK(a.str() == b.str());
}

TEST_CASE("vector and GP trials run") {
  auto vec = KeyValueConfig::parse(R"(
[plant]
kind = vector
gain_matrix = 1 2; 3 4
noise_cov = 1 0; 0 2
[controller]
policy = matrix
gain_matrix = 0.9 1.8; 2.7 3.6
[attack]
kind = ls
learning_length = 20
[detector]
test = covariance
tolerance = 0.1
test_time = 100
)");
  const auto vo = run_trial(build_experiment(vec), 0);
  CHECK(vo.valid);
  CHECK(vo.estimate);

  auto gp = KeyValueConfig::parse(R"(
[plant]
kind = nonlinear
dynamics = quadratic-sine
noise_var = 1
[controller]
policy = quadratic
gain = 1.1
[attack]
kind = gp
learning_length = 25
[detector]
test = variance
tolerance = 0.1
test_time = 60
)");
  const auto go = run_trial(build_experiment(gp), 0);
  CHECK(go.valid);
  CHECK(std::isfinite(go.gp_psi));
}

}  // TEST_SUITE
