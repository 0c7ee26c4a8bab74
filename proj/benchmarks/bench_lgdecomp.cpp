#include <benchmark/benchmark.h>

#include "lgdecomp/azimuthal_spectrum.hpp"
#include "lgdecomp/fixtures.hpp"
#include "lgdecomp/radial_fit.hpp"
#include "lgdecomp/waist_optimizer.hpp"

namespace {

void BM_EvalRadial(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const lgd::BeamWaist w0(1e-3);
  double r = 0.1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lgd::eval_radial({150, p}, w0, r));
    r = r < 9e-3 ? r + 1e-5 : 0.1e-3;
  }
}
BENCHMARK(BM_EvalRadial)->Arg(10)->Arg(100)->Arg(300);

void BM_EvalRadialAll(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const lgd::BeamWaist w0(1e-3);
  for (auto _ : state) benchmark::DoNotOptimize(lgd::eval_radial_all(40, p, w0, 3e-3));
}
BENCHMARK(BM_EvalRadialAll)->Arg(60)->Arg(300);

void BM_AzimuthalDecompose512(benchmark::State& state) {
  const lgd::DetectorSpec spec = lgd::DetectorSpec::square(512, 50e-6);
  const lgd::PolarImage polar = lgd::render_modes_polar(lgd::random_modes(1, 20, 8, 8), lgd::BeamWaist(1.5e-3), spec);
  for (auto _ : state) benchmark::DoNotOptimize(lgd::azimuthal_decompose(polar));
}
BENCHMARK(BM_AzimuthalDecompose512)->Unit(benchmark::kMillisecond);

void BM_ToPolar512(benchmark::State& state) {
  const lgd::DetectorSpec spec = lgd::DetectorSpec::square(512, 50e-6);
  const lgd::CartesianImage img = lgd::render_modes({{{3, 2}, 1.0}}, lgd::BeamWaist(1.5e-3), spec);
  for (auto _ : state) benchmark::DoNotOptimize(lgd::to_polar(img, spec));
}
BENCHMARK(BM_ToPolar512)->Unit(benchmark::kMillisecond);

void BM_FitRadial(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const lgd::RadialField f{"bench", 5, lgd::BeamWaist(800e-6), {{p / 2, 1.0}, {p, 0.5}}};
  const lgd::RadialSamples s = f.sample(lgd::uniform_radii(256, 12.8e-3));
  for (auto _ : state) benchmark::DoNotOptimize(lgd::fit_radial(s, f.w0, p));
}
BENCHMARK(BM_FitRadial)->Arg(20)->Arg(100)->Arg(250)->Unit(benchmark::kMillisecond);

void BM_EffectiveArea(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lgd::effective_area({60, p}));
}
BENCHMARK(BM_EffectiveArea)->Arg(50)->Arg(290)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
