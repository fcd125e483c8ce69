#include <cstdint>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "trajfair/grid.h"
#include "trajfair/similarity.h"

namespace {

trajfair::Heatmap RandomHeatmap(std::size_t side, std::mt19937_64& rng) {
  const auto spec = trajfair::GridSpec::FromOrigin(39.9, 116.4, side, side, 100.0);
  trajfair::Heatmap h{spec, trajfair::Matrix<std::int64_t>(side, side, 0), 0};
  for (auto& c : h.counts.data()) {
    if (rng() % 3 == 0) c = static_cast<std::int64_t>(rng() % 50);
  }
  return h;
}

void BM_SsimGlobal(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto a = RandomHeatmap(side, rng);
  const auto b = RandomHeatmap(side, rng);
  const trajfair::SsimParams params;
  for (auto _ : state) benchmark::DoNotOptimize(trajfair::SsimGlobal(a, b, params));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side * side));
}
BENCHMARK(BM_SsimGlobal)->RangeMultiplier(4)->Range(16, 1024);

void BM_PairwiseSsim(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::vector<trajfair::Heatmap> maps;
  for (int i = 0; i < state.range(0); ++i) maps.push_back(RandomHeatmap(64, rng));
  const trajfair::SsimParams params;
  for (auto _ : state) benchmark::DoNotOptimize(trajfair::PairwiseSsim(maps, params));
}
BENCHMARK(BM_PairwiseSsim)->Arg(10)->Arg(50)->Arg(100);

}  // namespace
