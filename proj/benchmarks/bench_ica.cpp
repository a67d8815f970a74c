#include "despeckle/core.hpp"
#include "despeckle/ica.hpp"
#include "despeckle/jointdiag.hpp"
#include "despeckle/phantom.hpp"
#include "despeckle/pipeline.hpp"
#include "despeckle/speckle.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace despeckle;

namespace {

// Observation matrix shaped like the pipeline input: n speckled phantom frames.
DataMatrix speckle_matrix(int n) {
  SpeckleConfig sc;
  sc.looks = 4.0;
  sc.n_frames = n;
  sc.seed = 7;
  ImageStack frames = generate_speckle_stack(retina_phantom(), sc).frames;
  for (Image& f : frames) f = log_compress(f).image;
  return build_data_matrix(frames);
}

MatrixSet diagonalizable_set(Eigen::Index d, int k) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  Matrix g(d, d);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = n(rng);
  const Matrix v = Eigen::HouseholderQR<Matrix>(g).householderQ();
  std::vector<Matrix> mats;
  for (int i = 0; i < k; ++i) {
    Vector diag(d);
    for (Eigen::Index j = 0; j < d; ++j) diag(j) = n(rng);
    mats.push_back(v * diag.asDiagonal() * v.transpose());
  }
  return MatrixSet(std::move(mats));
}

void run_algorithm(benchmark::State& state, Algorithm a) {
  const DataMatrix X = speckle_matrix(static_cast<int>(state.range(0)));
  const IcaConfig cfg = IcaConfig::defaults(a);
  for (auto _ : state) benchmark::DoNotOptimize(separate(X, cfg));
}

}  // namespace

static void BM_Whiten(benchmark::State& state) {
  const DataMatrix X = speckle_matrix(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(whiten(X));
}
BENCHMARK(BM_Whiten)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

static void BM_JointDiagonalize(benchmark::State& state) {
  const MatrixSet set = diagonalizable_set(state.range(0), 10);
  for (auto _ : state) benchmark::DoNotOptimize(joint_diagonalize(set));
}
BENCHMARK(BM_JointDiagonalize)->Arg(5)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMicrosecond);

static void BM_InfoMax(benchmark::State& state) { run_algorithm(state, Algorithm::InfoMax); }
static void BM_FastIca(benchmark::State& state) { run_algorithm(state, Algorithm::FastIca); }
static void BM_Jade(benchmark::State& state) { run_algorithm(state, Algorithm::Jade); }
static void BM_Sobi(benchmark::State& state) { run_algorithm(state, Algorithm::Sobi); }

BENCHMARK(BM_InfoMax)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FastIca)->Arg(5)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Jade)->Arg(5)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sobi)->Arg(5)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);
