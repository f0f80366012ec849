#include <benchmark/benchmark.h>

#include <random>

#include "usbeam/bone_probability.hpp"

namespace {

using namespace usbeam;

Image speckle(std::size_t rows, std::size_t cols) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Image im(rows, cols);
  for (double& v : im.values()) v = u(rng);
  return im;
}

void BM_LogGabor(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Image im = speckle(n, n);
  const FilterBankConfig bank;
  for (auto _ : state) benchmark::DoNotOptimize(log_gabor_filter(im, bank, 0));
}
BENCHMARK(BM_LogGabor)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_BoneProbabilityMap(benchmark::State& state) {
  // Default grid: 401 x 161 pixels.
  const Image im = speckle(401, 161);
  for (auto _ : state) benchmark::DoNotOptimize(bone_probability_map(im));
}
BENCHMARK(BM_BoneProbabilityMap)->Unit(benchmark::kMillisecond);

}  // namespace
