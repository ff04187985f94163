#include <gelnet/dpgelnet.hpp>
#include <gelnet/evaluation.hpp>
#include <gelnet/gelnet.hpp>
#include <gelnet/rope.hpp>
#include <gelnet/screening.hpp>

#include <benchmark/benchmark.h>

using namespace gelnet;

namespace {

SymMatrix band_correlation(Index p) {
  const auto truth = gen_model({5, p, 1});
  return sample_correlation(sample_gaussian(truth.sigma, 2 * p, 2));
}

SymMatrix block_correlation(Index blocks, Index size) {
  const Index p = blocks * size;
  Matrix sigma = Matrix::Zero(p, p);
  for (Index b = 0; b < blocks; ++b) sigma.block(b * size, b * size, size, size).setConstant(0.6);
  sigma.diagonal().setOnes();
  return sample_correlation(sample_gaussian(SymMatrix::from_symmetric(sigma), 400, 3));
}

void BM_Gelnet(benchmark::State& state) {
  const auto s = band_correlation(state.range(0));
  const auto spec = validate(s.mat(), 0.2, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(gelnet_fit(spec));
}

void BM_Dpgelnet(benchmark::State& state) {
  const auto s = band_correlation(state.range(0));
  const auto spec = validate(s.mat(), 0.2, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(dpgelnet_fit(spec));
}

void BM_Rope(benchmark::State& state) {
  const auto s = band_correlation(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rope_solve(s, 0.2));
}

void BM_BlocksUnscreened(benchmark::State& state) {
  const auto spec = validate(block_correlation(5, 20).mat(), 0.3, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(fit_direct(spec, Solver::Gelnet));
}

void BM_BlocksScreened(benchmark::State& state) {
  const auto spec = validate(block_correlation(5, 20).mat(), 0.3, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_blockwise(spec, Solver::Gelnet));
}

void BM_PathWarm(benchmark::State& state) {
  const auto s = band_correlation(50);
  for (auto _ : state) {
    std::optional<WarmStart> warm;
    for (double lambda = 0.8; lambda > 0.05; lambda *= 0.8) {
      const auto fit = gelnet_fit(validate(s.mat(), lambda, 0.5), warm);
      warm = WarmStart{fit.theta, fit.w};
    }
  }
}

void BM_PathCold(benchmark::State& state) {
  const auto s = band_correlation(50);
  for (auto _ : state)
    for (double lambda = 0.8; lambda > 0.05; lambda *= 0.8)
      benchmark::DoNotOptimize(gelnet_fit(validate(s.mat(), lambda, 0.5)));
}

}  // namespace

BENCHMARK(BM_Gelnet)->Arg(20)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Dpgelnet)->Arg(20)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Rope)->Arg(20)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BlocksUnscreened)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BlocksScreened)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PathWarm)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PathCold)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
