#include <benchmark/benchmark.h>

#include <Eigen/Core>

#include "ydeflow/expm.hpp"
#include "ydeflow/linear.hpp"
#include "ydeflow/paths.hpp"
#include "ydeflow/solver.hpp"
#include "ydeflow/transport.hpp"
#include "ydeflow/young.hpp"

namespace {

using namespace ydeflow;

SampledPath bench_driver(Eigen::Index n) {
  return gen_fbm(0.75, n, 1.0, 7);
}

void BM_GenFbm(benchmark::State& state) {
  const Eigen::Index n = (Eigen::Index(1) << state.range(0)) + 1;
  for (auto _ : state) {
    auto p = gen_fbm(0.75, n, 1.0, 7);
    benchmark::DoNotOptimize(p.values.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_GenFbm)->DenseRange(10, 16, 2)->Complexity();

void BM_YoungIntegrate(benchmark::State& state) {
  const Eigen::Index n = (Eigen::Index(1) << state.range(0)) + 1;
  auto z = bench_driver(n);
  auto y = IntegrandPath::along(z, [](const Eigen::VectorXd& x) {
    return Eigen::MatrixXd::Constant(1, 1, 2.0 * x(0));
  });
  for (auto _ : state) {
    auto i = young_integrate(y, z);
    benchmark::DoNotOptimize(i.values.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_YoungIntegrate)->DenseRange(10, 16, 2)->Complexity();

void BM_SolveEulerLinear(benchmark::State& state) {
  const Eigen::Index n = (Eigen::Index(1) << state.range(0)) + 1;
  auto z = bench_driver(n);
  Eigen::MatrixXd a(2, 2);
  a << 0, -1, 1, 0;
  auto field = VectorFieldFamily::from_linear(a);
  Eigen::VectorXd x0(2);
  x0 << 1, 0;
  for (auto _ : state) {
    auto t = solve_euler(field, z, x0);
    benchmark::DoNotOptimize(t.states.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_SolveEulerLinear)->DenseRange(10, 16, 2)->Complexity();

void BM_Expm(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(n, n);
  for (auto _ : state) {
    Eigen::MatrixXd e = expm(a);
    benchmark::DoNotOptimize(e.data());
  }
}
BENCHMARK(BM_Expm)->Arg(4)->Arg(16)->Arg(64);

void BM_DecomposeBlocks(benchmark::State& state) {
  const Eigen::Index n = (Eigen::Index(1) << state.range(0)) + 1;
  auto z = bench_driver(n);
  Eigen::MatrixXd a(4, 4);
  a << 0.3, -1, 0.2, 0, 1, 0.1, 0, 0.4, 0, 0, -0.2, 0.5, 0, 0, -0.5, 0.1;
  LinearSystem sys(a, 2);
  for (auto _ : state) {
    auto d = decompose_blocks(sys, z);
    benchmark::DoNotOptimize(d.g1.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_DecomposeBlocks)->DenseRange(8, 12, 2)->Complexity();

void BM_HorizontalLift(benchmark::State& state) {
  const Eigen::Index n = (Eigen::Index(1) << state.range(0)) + 1;
  SampledPath x;
  x.times = uniform_grid(n, 1.0);
  x.values.resize(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    double phi = 2 * M_PI * x.times(i);
    double s = std::sin(M_PI / 3), c = std::cos(M_PI / 3);
    x.values.row(i) << s * std::cos(phi), s * std::sin(phi), c;
  }
  x.alpha = 1.0;
  auto conn = ConnectionForm::sphere_levi_civita();
  const double s = std::sin(M_PI / 3), c = std::cos(M_PI / 3);
  Eigen::Matrix<double, 3, 2> u0;
  u0 << 0, -c, 1, 0, 0, s;
  for (auto _ : state) {
    auto lift = horizontal_lift(conn, x, u0);
    benchmark::DoNotOptimize(lift.frames.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_HorizontalLift)->DenseRange(10, 14, 2)->Complexity();

}  // namespace

BENCHMARK_MAIN();
