#include <benchmark/benchmark.h>

#include "usbeam/simulator.hpp"

namespace {

using namespace usbeam;

void BM_SimulateFrame(benchmark::State& state) {
  const ArrayGeometry g = make_linear_array(128, 0.3e-3, 7.6e6, 31.25e6, 1540.0);
  const Phantom phantom = make_bone_phantom(0);
  const PulseModel pulse;
  const std::size_t n = required_samples(phantom, g, 0.1, pulse);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_frame(phantom, g, 0.1, pulse, n));
}
BENCHMARK(BM_SimulateFrame)->Unit(benchmark::kMillisecond);

}  // namespace
