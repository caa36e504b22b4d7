#include <benchmark/benchmark.h>

#include "dtsfd/solver.hpp"
#include "dtsfd/spectral.hpp"
#include "dtsfd/synth.hpp"
#include "dtsfd/tuning.hpp"

using namespace dtsfd;

namespace {

struct Data {
  TimeSeries x;
  TimeSeries y;
};

Data make_data(int p, std::int64_t n) {
  Rng rng(7);
  const BenchmarkInstance inst = draw_benchmark_instance(ModelKind::kVar3, p, rng);
  return {simulate(inst.models.x, n, rng), simulate(inst.models.y, n, rng)};
}

const Data& data60() {
  static const Data d = make_data(60, 2048);
  return d;
}

const FactoredStatistics& stats60() {
  static const FactoredStatistics fs = factorize(
      spectral_statistics(data60().x, data60().y, FrequencyGrid::from_blocks(2048, 4)));
  return fs;
}

}  // namespace

static void BM_Dft(benchmark::State& state) {
  const Data d = make_data(static_cast<int>(state.range(0)), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(compute_dft(d.x));
}
BENCHMARK(BM_Dft)->Args({60, 2048})->Args({120, 4096})->Unit(benchmark::kMillisecond);

static void BM_SpectralStatistics(benchmark::State& state) {
  const FrequencyGrid grid = FrequencyGrid::from_blocks(2048, 4);
  const Data& d = data60();
  for (auto _ : state) benchmark::DoNotOptimize(spectral_statistics(d.x, d.y, grid));
}
BENCHMARK(BM_SpectralStatistics)->Unit(benchmark::kMillisecond);

static void BM_DeltaUpdate(benchmark::State& state) {
  const FactoredStatistics& fs = stats60();
  const HermitianMatrix sx(fs.sx[0]), sy(fs.sy[0]);
  const CMatrix wu = CMatrix::Zero(fs.p(), fs.p());
  for (auto _ : state) {
    benchmark::DoNotOptimize(delta_update(fs.ex[0], fs.ey[0], sx, sy, wu, 2.0));
  }
}
BENCHMARK(BM_DeltaUpdate)->Unit(benchmark::kMicrosecond);

static void BM_GroupSoftThreshold(benchmark::State& state) {
  const FactoredStatistics& fs = stats60();
  const RMatrix w = RMatrix::Constant(fs.p(), fs.p(), 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(group_soft_threshold(fs.difference, w, 2.0));
}
BENCHMARK(BM_GroupSoftThreshold)->Unit(benchmark::kMicrosecond);

static void BM_Estimate(benchmark::State& state) {
  const FactoredStatistics& fs = stats60();
  PenaltySpec pen;
  pen.kind = static_cast<PenaltyKind>(state.range(0));
  pen.lambda = 0.1 * zero_solution_bound(fs);
  for (auto _ : state) benchmark::DoNotOptimize(estimate(fs, pen, {}));
}
BENCHMARK(BM_Estimate)
    ->Arg(static_cast<int>(PenaltyKind::kLasso))
    ->Arg(static_cast<int>(PenaltyKind::kLogSum))
    ->Unit(benchmark::kMillisecond);

static void BM_ModelDraw(benchmark::State& state) {
  Rng rng(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(draw_benchmark_instance(ModelKind::kVar3, 60, rng));
  }
}
BENCHMARK(BM_ModelDraw)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
