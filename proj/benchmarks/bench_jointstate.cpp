#include <benchmark/benchmark.h>

#include "polent/jointstate.hpp"
#include "polent/spectral.hpp"

namespace {

using namespace polent;

JsaGrid model_jsa(std::size_t n) {
  const auto grid = FrequencyGrid::wavelength_window(1535.2 * kNano, 40.0 * kNano, n);
  return apply_bandpass(build_jsa(PdcModel{}, grid));
}

void BM_BuildJsa(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto grid = FrequencyGrid::wavelength_window(1535.2 * kNano, 40.0 * kNano, n);
  for (auto _ : state) benchmark::DoNotOptimize(build_jsa(PdcModel{}, grid));
}
BENCHMARK(BM_BuildJsa)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_PostSelect(benchmark::State& state) {
  const auto jsa = model_jsa(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(post_select(jsa, SplitterResponse{}));
}
BENCHMARK(BM_PostSelect)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_DParameter(benchmark::State& state) {
  const auto amps = post_select(model_jsa(static_cast<std::size_t>(state.range(0))), SplitterResponse{});
  double tau = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(d_parameter(amps, tau));
    tau += 1e-16;
  }
}
BENCHMARK(BM_DParameter)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_DelaySweep(benchmark::State& state) {
  const auto amps = post_select(model_jsa(512), SplitterResponse{});
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(delay_sweep(amps, -400.0 * kFemto, 400.0 * kFemto, n));
}
BENCHMARK(BM_DelaySweep)->Arg(801)->Unit(benchmark::kMillisecond);

}  // namespace
