#include <benchmark/benchmark.h>

#include <random>

#include "hypo/lift.hpp"
#include "hypo/spatial.hpp"
#include "hypo/spectral.hpp"
#include "support.hpp"

using namespace hypo;

static void BM_Lift(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const Image img = testsupport::piecewiseSmooth(size, size);
  const AngleGrid grid(30);
  for (auto _ : state) benchmark::DoNotOptimize(lift(img, LiftParams{}, grid));
}
BENCHMARK(BM_Lift)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_Diffuse(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const AngleGrid grid(30);
  const LiftedField field = lift(testsupport::piecewiseSmooth(size, size), LiftParams{}, grid);
  DiffusionParams p;
  p.grid = grid;
  p.useRotationSymmetry = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(diffuse(field, p));
}
BENCHMARK(BM_Diffuse)->Args({64, 0})->Args({128, 0})->Args({128, 1})->Unit(benchmark::kMillisecond);

static void BM_DiffuseVarying(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  std::mt19937_64 rng(7);
  const AngleGrid grid(30);
  const Mask mask = testsupport::randomMask(size, size, 0.3, rng);
  const LiftedField field = lift(testsupport::piecewiseSmooth(size, size), LiftParams{}, grid);
  VaryingCoeffParams p;
  p.timeSteps = 8;
  const CoefficientField coeffs = coefficientField(mask, p);
  for (auto _ : state) benchmark::DoNotOptimize(diffuseVarying(field, coeffs, p));
}
BENCHMARK(BM_DiffuseVarying)->Arg(64)->Unit(benchmark::kMillisecond);
