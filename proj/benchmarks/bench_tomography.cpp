#include <benchmark/benchmark.h>

#include "polent/tomography.hpp"

namespace {

using namespace polent;

ProjectionValues case_counts(std::uint64_t seed) {
  const auto rho = add_background(density_matrix(0.547, 0.453, {0.361, 0.132}), 0.0125);
  CountModel model;
  model.pair_rate = calibrate_pair_rate(rho, 4.0);
  model.accidental_rate = model.gated_accidental_rate();
  return subtract_accidentals(sample_counts(expected_rates(rho, model), seed, model));
}

void BM_LinearInversion(benchmark::State& state) {
  const auto counts = case_counts(1);
  for (auto _ : state) benchmark::DoNotOptimize(linear_inversion(counts));
}
BENCHMARK(BM_LinearInversion);

void BM_MleReconstruct(benchmark::State& state) {
  const auto counts = case_counts(2);
  for (auto _ : state) benchmark::DoNotOptimize(mle_reconstruct(counts));
}
BENCHMARK(BM_MleReconstruct)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
