#include <benchmark/benchmark.h>

#include <complex>
#include <random>
#include <vector>

#include "hypo/spectral.hpp"
#include "hypo/tridiagonal.hpp"

using namespace hypo;

static void BM_PeriodicThomasComplex(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> lower(n, -0.4), diag(n, 2.0), upper(n, -0.4);
  const PeriodicTridiagonalSolver<double> solver(lower, diag, upper);
  const std::vector<std::complex<double>> input(n, {1.0, 0.5});
  std::vector<std::complex<double>> rhs(n);
  for (auto _ : state) {
    rhs = input;
    solver.solve(std::span<std::complex<double>>(rhs));
    benchmark::DoNotOptimize(rhs.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_PeriodicThomasComplex)->Arg(30)->Arg(64)->Arg(256);

static void BM_ColumnPropagator(benchmark::State& state) {
  DiffusionParams p;
  p.timeSteps = 32;
  const ColumnPropagator prop(0.1, -0.2, p);
  const std::vector<Complex> input(30, {1.0, 0.0});
  std::vector<Complex> c(30);
  for (auto _ : state) {
    c = input;
    prop.evolve(c);
    benchmark::DoNotOptimize(c.data());
  }
}
BENCHMARK(BM_ColumnPropagator);
BENCHMARK_MAIN();
