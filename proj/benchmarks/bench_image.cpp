#include "despeckle/metrics.hpp"
#include "despeckle/phantom.hpp"
#include "despeckle/pipeline.hpp"
#include "despeckle/registration.hpp"
#include "despeckle/speckle.hpp"

#include <benchmark/benchmark.h>

using namespace despeckle;

namespace {

SpeckleStack jittered(int n) {
  SpeckleConfig sc;
  sc.looks = 4.0;
  sc.n_frames = n;
  sc.seed = 3;
  sc.jitter = {8.0, 8.0, radians(2.0)};
  return generate_speckle_stack(retina_phantom(), sc);
}

}  // namespace

static void BM_EstimateTranslation(benchmark::State& state) {
  const SpeckleStack st = jittered(2);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_translation(st.frames[0], st.frames[1]));
}
BENCHMARK(BM_EstimateTranslation)->Unit(benchmark::kMicrosecond);

static void BM_RegisterStack(benchmark::State& state) {
  const SpeckleStack st = jittered(static_cast<int>(state.range(0)));
  RegistrationConfig cfg;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(register_stack(st.frames, cfg));
}
BENCHMARK(BM_RegisterStack)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_MedianBaseline(benchmark::State& state) {
  const ImageStack frames = jittered(static_cast<int>(state.range(0))).frames;
  for (auto _ : state) benchmark::DoNotOptimize(median_baseline(frames));
}
BENCHMARK(BM_MedianBaseline)->Arg(5)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_Evaluate(benchmark::State& state) {
  const Image img = jittered(1).frames[0];
  const RoiSet rois = phantom_rois();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(img, rois));
}
BENCHMARK(BM_Evaluate)->Unit(benchmark::kMicrosecond);
