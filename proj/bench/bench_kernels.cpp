#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "fhc/kernels.hpp"
#include "fhc/random_vectors.hpp"

using namespace fhc;

namespace {

struct Fixture {
  SpaceSpec space = SpaceSpec::lp(2.0);
  std::shared_ptr<const UFamily> family =
      std::make_shared<const UFamily>(UFamily::shift(WeightSequence::two_sided(2.0, 0.5)));
  DistributionSpec law = make_gaussian(0.0, 1.0);
  std::vector<kernels::Ball> balls{{TruncatedVector(), 1.0}, {TruncatedVector(0, {0.5, 0.25}), 0.8}};
  std::vector<long> grid{0, 20, 40, 60, 80, 100};

  kernels::ReplicaSource source(long extra) const {
    Window w = sample_window(*family, 30);
    return {&space, family.get(), &law, w.lo, w.hi, w.hi + extra, w.scales, 1};
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

template <kernels::Exec E>
void BM_BallHitFlags(benchmark::State& state) {
  const auto& f = fixture();
  const auto src = f.source(0);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::ball_hit_flags(src, f.balls, state.range(0), E));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <kernels::Exec E>
void BM_MixingCells(benchmark::State& state) {
  const auto& f = fixture();
  const auto src = f.source(100);
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::mixing_cells(src, f.balls[0], f.balls[1], f.grid, state.range(0), E));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <kernels::Exec E>
void BM_VisitHits(benchmark::State& state) {
  const auto& f = fixture();
  const auto s = sample_vector(f.space, f.family, f.law, 30, nullptr, 1, 0, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::visit_hits(s, f.balls, state.range(0), E));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_BallHitFlags<kernels::Exec::Serial>)->Arg(1000)->Arg(10000);
BENCHMARK(BM_BallHitFlags<kernels::Exec::Parallel>)->Arg(1000)->Arg(10000);
BENCHMARK(BM_MixingCells<kernels::Exec::Serial>)->Arg(1000)->Arg(10000);
BENCHMARK(BM_MixingCells<kernels::Exec::Parallel>)->Arg(1000)->Arg(10000);
BENCHMARK(BM_VisitHits<kernels::Exec::Serial>)->Arg(1000)->Arg(10000);
BENCHMARK(BM_VisitHits<kernels::Exec::Parallel>)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
