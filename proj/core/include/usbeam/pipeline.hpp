#ifndef USBEAM_PIPELINE_HPP
#define USBEAM_PIPELINE_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "usbeam/beamformer.hpp"
#include "usbeam/bone_probability.hpp"
#include "usbeam/config.hpp"
#include "usbeam/enhancement.hpp"
#include "usbeam/metrics.hpp"
#include "usbeam/simulator.hpp"

namespace usbeam {

/// Every intermediate product of one simulate -> beamform -> BPM -> enhance -> evaluate run.
struct PipelineResult {
  ImagingGrid grid;
  std::vector<double> angles;
  std::size_t n_samples = 0;
  PlaneWaveFrame spw_frame;  ///< 0-degree transmission, with noise when configured

  BeamformedImage spw_envelope;
  BeamformedImage cpwc_envelope;
  BModeImage spw_bmode;
  BModeImage cpwc_bmode;
  BoneProbabilityMap bpm;
  EnhancedImage beam;
  RoiMask roi;

  PointResponse spw_point;
  PointResponse cpwc_point;
  MetricsReport spw_metrics;   ///< SPW B-mode vs the BEAM target
  MetricsReport cpwc_metrics;  ///< CPWC B-mode vs the BEAM target
  MetricsReport beam_metrics;  ///< BEAM image (CR/SNR only)
};

/// RF window long enough for every echo and for the deepest grid pixel at every angle.
std::size_t acquisition_samples(const PipelineConfig& config, const Phantom& phantom);

/// The configured sweep with per-frame noise; frame j uses a noise stream derived from (seed, j).
RfSweep simulate_acquisition(const PipelineConfig& config, const Phantom& phantom);

/// The frame whose angle is closest to 0.
const PlaneWaveFrame& broadside_frame(const RfSweep& sweep);

/// Runs every stage in memory. Stage failures are rethrown as StageError.
PipelineResult run_pipeline(const PipelineConfig& config, const Phantom& phantom);

/// Files written by write_pipeline_outputs, in order.
std::vector<std::string> pipeline_output_names();

/// Line-oriented `key value` report of metrics and point-response widths.
std::string pipeline_report(const PipelineResult& result, const PipelineConfig& config);

void write_pipeline_outputs(const PipelineResult& result, const PipelineConfig& config,
                            const std::filesystem::path& out_dir);

}  // namespace usbeam

#endif  // USBEAM_PIPELINE_HPP
