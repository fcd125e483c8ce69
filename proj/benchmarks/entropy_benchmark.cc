#include <cstdint>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "trajfair/entropy.h"

namespace {

void BM_ActualEntropy(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::vector<std::uint8_t> s(static_cast<std::size_t>(state.range(0)));
  for (auto& b : s) b = rng() % 8 == 0 ? 1 : 0;
  for (auto _ : state) benchmark::DoNotOptimize(trajfair::ActualEntropy(s));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ActualEntropy)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_FuzzyEntropy(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> step(0.0, 1.0);
  std::vector<double> series(static_cast<std::size_t>(state.range(0)));
  double x = 0;
  for (auto& v : series) v = x += step(rng);
  for (auto _ : state) benchmark::DoNotOptimize(trajfair::FuzzyEntropy(series, 2, 0.2, 2.0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FuzzyEntropy)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_SampleEntropy2D(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const auto side = static_cast<std::size_t>(state.range(0));
  trajfair::Matrix<double> image(side, side, 0.0);
  for (auto& v : image.data()) v = static_cast<double>(rng() % 6);
  for (auto _ : state) benchmark::DoNotOptimize(trajfair::SampleEntropy2D(image, 1, 0.5));
}
BENCHMARK(BM_SampleEntropy2D)->Arg(16)->Arg(32)->Arg(64);

}  // namespace
