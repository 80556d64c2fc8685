#include <benchmark/benchmark.h>

#include "ipc/numerics.hpp"
#include "ipc/problems.hpp"
#include "ipc/solvers.hpp"

namespace {

void BM_IpcStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto quad = ipc::QuadraticProblem::generate(n, 10.0, 1);
  const auto oracle = quad.oracle();
  const Eigen::VectorXd x = quad.x0;
  const Eigen::VectorXd gx = oracle.eval_grad(x);
  const Eigen::VectorXd gz = oracle.eval_grad(x - 0.05 * gx);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ipc::ipc_step(x, gx, gz, 0.05, 0.5, 1.0));
  }
}
BENCHMARK(BM_IpcStep)->Arg(100)->Arg(1000)->Arg(10000);

void BM_LineSearch(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto quad = ipc::QuadraticProblem::generate(n, 100.0, 2);
  const auto oracle = quad.oracle();
  const Eigen::VectorXd gx = oracle.eval_grad(quad.x0);
  ipc::LineSearchParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ipc::line_search(quad.x0, gx, 1.0, params, oracle));
  }
}
BENCHMARK(BM_LineSearch)->Arg(100)->Arg(1000);

void BM_FractionalGradient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto frac = ipc::FractionalProblem::generate(n, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(frac.grad(frac.x0));
  }
}
BENCHMARK(BM_FractionalGradient)->Arg(200)->Arg(1000);

void BM_SolveQuadratic(benchmark::State& state) {
  const auto quad = ipc::QuadraticProblem::generate(50, 100.0, 1);
  const auto oracle = quad.oracle();
  ipc::SolverConfig cfg;
  cfg.algorithm = static_cast<ipc::Algorithm>(state.range(0));
  cfg.beta = cfg.algorithm == ipc::Algorithm::ConvexIpc ? 0.5 : 0.9;
  cfg.epsilon = 1e-6;
  if (cfg.algorithm == ipc::Algorithm::IpcConstant) cfg.h_const = 0.9 / quad.cond;
  if (cfg.algorithm == ipc::Algorithm::ConvexIpc) {
    cfg.line_search.nu = 0.9;
    cfg.line_search.mu = 0.4;
    cfg.line_search.theta = 0.7;
    cfg.line_search.h_hi = 2.0 / quad.cond;
    cfg.line_search.gamma0_init = cfg.line_search.h_hi;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(ipc::solve(oracle, cfg, quad.x0));
  }
}
BENCHMARK(BM_SolveQuadratic)->Arg(0)->Arg(1)->Arg(2);

}  // namespace

BENCHMARK_MAIN();
