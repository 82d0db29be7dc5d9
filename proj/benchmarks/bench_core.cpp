#include <benchmark/benchmark.h>

#include <complex>
#include <random>
#include <vector>

#include "oscsim/numerics.hpp"
#include "oscsim/oscillator.hpp"
#include "oscsim/prep.hpp"
#include "oscsim/sp2.hpp"
#include "oscsim/trotter.hpp"
#include "oscsim/types.hpp"

namespace {

using namespace oscsim;

cvec random_state(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  cvec v(n);
  for (auto& z : v) z = cplx(uniform(rng), uniform(rng));
  return normalized(v);
}

HermitianMatrix random_hermitian(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  auto h = HermitianMatrix::zero(n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) h.at(r, c) = cplx(uniform(rng), uniform(rng));
  h.symmetrize();
  return h;
}

void BM_FftUnitary(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const cvec v = random_state(n, 11);
  for (auto _ : state)
    benchmark::DoNotOptimize(fft_unitary(v, FftDirection::forward));
  state.SetComplexityN(n);
}
BENCHMARK(BM_FftUnitary)->Arg(128)->Arg(512)->Arg(2048)->Complexity();

void BM_CenteredDft(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const cvec v = random_state(n, 12);
  for (auto _ : state)
    benchmark::DoNotOptimize(centered_dft_apply(v, FftDirection::forward));
  state.SetComplexityN(n);
}
BENCHMARK(BM_CenteredDft)->Arg(128)->Arg(512)->Arg(2048)->Complexity();

void BM_Eigh(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto h = random_hermitian(n, 13);
  for (auto _ : state) benchmark::DoNotOptimize(eigh(h));
  state.SetComplexityN(n);
}
BENCHMARK(BM_Eigh)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond)->Complexity();

void BM_ApplySchedule(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const auto grid = GridSpec::make(256);
  const auto schedule = build_schedule(p, 0.05, SplittingKind::qho);
  const cvec v = random_state(grid.n, 14);
  for (auto _ : state)
    benchmark::DoNotOptimize(apply_schedule(schedule, v, grid));
}
BENCHMARK(BM_ApplySchedule)->Arg(1)->Arg(2)->Arg(3);

void BM_DefectPoly(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(defect_poly(p));
}
BENCHMARK(BM_DefectPoly)->Arg(1)->Arg(2)->Arg(3);

void BM_JcSplitStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto grid = GridSpec::make(n);
  const cvec v = random_state(2 * n, 15);
  for (auto _ : state)
    benchmark::DoNotOptimize(jc_split_step(grid, 0.02, v));
}
BENCHMARK(BM_JcSplitStep)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
