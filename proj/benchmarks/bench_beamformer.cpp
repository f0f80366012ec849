#include <benchmark/benchmark.h>

#include "usbeam/beamformer.hpp"
#include "usbeam/simulator.hpp"

namespace {

using namespace usbeam;

struct Scene {
  ArrayGeometry geometry = make_linear_array(128, 0.3e-3, 7.6e6, 31.25e6, 1540.0);
  ImagingGrid grid = ImagingGrid::uniform(-6e-3, 6e-3, 0.15e-3, 15e-3, 25e-3, 0.05e-3);
  PlaneWaveFrame frame;

  Scene() {
    const Phantom phantom({{{0.0, 20e-3}, 1.0}}, {});
    const PulseModel pulse;
    frame = simulate_frame(phantom, geometry, 0.0, pulse, required_samples(phantom, geometry, 0.0, pulse) + 256);
  }
};

const Scene& scene() {
  static const Scene s;
  return s;
}

void BM_DasFrame(benchmark::State& state) {
  const Scene& s = scene();
  const DasBeamformer das(s.geometry, s.grid, ApodizationSpec{}, static_cast<unsigned>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(das.beamform(s.frame));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.grid.rows() * s.grid.cols()));
}
BENCHMARK(BM_DasFrame)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_Envelope(benchmark::State& state) {
  const Scene& s = scene();
  const BeamformedImage rf = das_beamform(s.frame, s.geometry, s.grid, ApodizationSpec{}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(envelope_detect(rf));
}
BENCHMARK(BM_Envelope)->Unit(benchmark::kMillisecond);

}  // namespace
