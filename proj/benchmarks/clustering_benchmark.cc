#include <random>

#include <benchmark/benchmark.h>

#include "trajfair/clustering.h"

namespace {

void BM_KMeans(benchmark::State& state) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> noise(0.0, 1.0);
  const auto n = static_cast<std::size_t>(state.range(0));
  trajfair::Matrix<double> x(n, 5, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < 5; ++c) x(i, c) = noise(rng) + 8.0 * static_cast<double>(i % 4);
  }
  for (auto _ : state) benchmark::DoNotOptimize(trajfair::KMeans(x, 4, 42));
}
BENCHMARK(BM_KMeans)->Arg(100)->Arg(1000);

void BM_ChooseK(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 1.0);
  trajfair::Matrix<double> x(200, 5, 0.0);
  for (std::size_t i = 0; i < 200; ++i) {
    for (std::size_t c = 0; c < 5; ++c) x(i, c) = noise(rng) + 8.0 * static_cast<double>(i % 3);
  }
  for (auto _ : state) benchmark::DoNotOptimize(trajfair::ChooseK(x, 2, 8, 42));
}
BENCHMARK(BM_ChooseK);

}  // namespace
