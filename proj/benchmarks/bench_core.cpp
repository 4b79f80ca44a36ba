#include "fracollo/assembly.hpp"
#include "fracollo/fractional_time.hpp"
#include "fracollo/lsq.hpp"
#include "fracollo/solver.hpp"

#include <benchmark/benchmark.h>

using namespace fracollo;

namespace {

Discretization disc_for(int n) {
  SpaceParams sp;
  sp.nx = sp.ny = n;
  return Discretization::build(case_domain(3), sp);
}

void BM_AssembleCollocation(benchmark::State& state) {
  const auto disc = disc_for(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto b = assemble_collocation(disc.dofs, disc.points.interior);
    benchmark::DoNotOptimize(b.A.nonZeros());
  }
  state.counters["rows"] = static_cast<double>(disc.points.interior.size());
}
BENCHMARK(BM_AssembleCollocation)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_AssembleFvm(benchmark::State& state) {
  const auto disc = disc_for(32);
  const double rho = 1e-4 * static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto b = assemble_fvm(disc.dofs, disc.points.interior, rho);
    benchmark::DoNotOptimize(b.S.nonZeros());
  }
}
BENCHMARK(BM_AssembleFvm)->Arg(1)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Factorize(benchmark::State& state) {
  const auto disc = disc_for(static_cast<int>(state.range(0)));
  SteadyParams p;
  p.space.nx = p.space.ny = static_cast<int>(state.range(0));
  const LsBlocks b = steady_blocks(disc, exponential_problem(0.1), p);
  const auto path = static_cast<SolverPath>(state.range(1));
  for (auto _ : state) {
    LsFactorization f(b.op, b.boundary, b.lambda, 0.01, path);
    benchmark::DoNotOptimize(&f);
  }
  state.SetLabel(to_string(path));
}
BENCHMARK(BM_Factorize)
    ->Args({16, static_cast<int>(SolverPath::qr)})
    ->Args({16, static_cast<int>(SolverPath::kkt)})
    ->Args({16, static_cast<int>(SolverPath::normal)})
    ->Args({32, static_cast<int>(SolverPath::qr)})
    ->Unit(benchmark::kMillisecond);

void BM_StepSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto disc = disc_for(n);
  SteadyParams p;
  p.space.nx = p.space.ny = n;
  const LsBlocks b = steady_blocks(disc, exponential_problem(0.1), p);
  const LsFactorization f(b.op, b.boundary, b.lambda, 0.01, SolverPath::qr);
  const Eigen::VectorXd prev = Eigen::VectorXd::Zero(b.unknowns());
  for (auto _ : state) {
    auto s = f.solve(b.rhs, b.boundary_data, prev);
    benchmark::DoNotOptimize(s.c.data());
  }
}
BENCHMARK(BM_StepSolve)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_MittagLeffler(benchmark::State& state) {
  const double alpha = static_cast<double>(state.range(0)) / 10.0;
  double z = -0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mittag_leffler(alpha, z));
    z = z < -30.0 ? -0.01 : z * 1.07;
  }
}
BENCHMARK(BM_MittagLeffler)->Arg(1)->Arg(5)->Arg(8)->Arg(10);

void BM_CqWeights(benchmark::State& state) {
  for (auto _ : state) {
    auto w = cq_weights(0.5, static_cast<std::size_t>(state.range(0)));
    benchmark::DoNotOptimize(w.data());
  }
}
BENCHMARK(BM_CqWeights)->Arg(2048)->Arg(1 << 16);

}  // namespace

BENCHMARK_MAIN();
