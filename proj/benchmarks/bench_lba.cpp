#include <benchmark/benchmark.h>

#include <cmath>

#include "lba/attacker.hpp"
#include "lba/config.hpp"
#include "lba/experiment.hpp"
#include "lba/gp.hpp"
#include "lba/linalg.hpp"
#include "lba/random.hpp"

using namespace lba;

static void BM_ScalarLS(benchmark::State& state) {
  RandomSource src(1, 0);
  const auto n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    attack::ScalarLSState s;
    double x = 0.0;
    for (int k = 0; k < n; ++k) {
      const double u = -0.88 * x, next = x + u + src.standard_normal();
      s = attack::ls_update_scalar(s, x, u, next);
      x = next;
    }
    benchmark::DoNotOptimize(attack::ls_estimate_scalar(s));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_ScalarLS)->Arg(400)->Arg(4000);

static void BM_VectorLS(benchmark::State& state) {
  RandomSource src(2, 0);
  Eigen::Matrix2d a;
  a << 1, 2, 3, 4;
  for (auto _ : state) {
    attack::VectorLSState s(2);
    Eigen::Vector2d x = Eigen::Vector2d::Zero();
    for (int k = 0; k < 400; ++k) {
      const Eigen::Vector2d u = -0.9 * a * x;
      const Eigen::Vector2d next = a * x + u + Eigen::Vector2d(src.standard_normal(), src.standard_normal());
      s = attack::ls_update_vector(std::move(s), x, u, next);
      x = next;
    }
    benchmark::DoNotOptimize(attack::ls_estimate_vector(s));
  }
}
BENCHMARK(BM_VectorLS);

static void BM_GpFit(benchmark::State& state) {
  RandomSource src(3, 0);
  attack::GPState s;
  s.standardize = true;
  for (int i = 0; i < state.range(0); ++i) {
    const double x = src.standard_normal(), u = -1.1 * x * x;
    s.add(x, u, x * x + std::sin(x) + u + src.standard_normal());
  }
  for (auto _ : state) benchmark::DoNotOptimize(attack::gp_fit(s));
}
BENCHMARK(BM_GpFit)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_OperatorNorm(benchmark::State& state) {
  RandomSource src(4, 0);
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = src.standard_normal();
  for (auto _ : state) benchmark::DoNotOptimize(operator_norm(m));
}
BENCHMARK(BM_OperatorNorm)->Arg(2)->Arg(16);

static void BM_ScalarTrial(benchmark::State& state) {
  const auto cfg = harness::build_experiment(harness::KeyValueConfig::parse(R"(
[plant]
kind = scalar
gain = 1
noise_var = 1
[controller]
policy = linear
gain = 0.88
[attack]
kind = ls
learning_length = 400
[detector]
test = variance
tolerance = 0.1
test_time = 800
)"));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(harness::run_trial(cfg, i++));
}
BENCHMARK(BM_ScalarTrial)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
