#ifndef USBEAM_DATASET_HPP
#define USBEAM_DATASET_HPP

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "usbeam/config.hpp"
#include "usbeam/container.hpp"
#include "usbeam/metrics.hpp"
#include "usbeam/simulator.hpp"

namespace usbeam {

/// One training triple: SPW RF input, BEAM target, BPM conditioning, plus the ROI.
/// Payloads are float32-representable so they survive the container unchanged.
struct DatasetRecord {
  std::string name;
  PlaneWaveFrame spw_rf;
  Image beam_target;  ///< clamped to [0, 1]
  Image bpm;
  RoiMask roi;

  friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

struct Dataset {
  ArrayGeometry geometry;
  ImagingGrid grid;
  std::string config_digest;
  std::vector<DatasetRecord> records;
};

struct NamedPhantom {
  std::string name;
  Phantom phantom;
};

/// Runs the pipeline per phantom; records keep the input order.
Dataset build_dataset(const PipelineConfig& config, const std::vector<NamedPhantom>& phantoms);

/**
 * Dataset container: kind "dataset", record_count, config_digest, geometry.*, grid.*,
 * record.<i>.name/.angle/.t0 metadata, and per record the arrays
 * record.<i>.spw_rf [samples, elements], .beam_target, .bpm, .roi_foreground,
 * .roi_background [axial, lateral].
 */
Container dataset_to_container(const Dataset& dataset);
Dataset dataset_from_container(const Container& container);

void export_dataset(const PipelineConfig& config, const std::vector<NamedPhantom>& phantoms,
                    const std::filesystem::path& out_path);

}  // namespace usbeam

#endif  // USBEAM_DATASET_HPP
