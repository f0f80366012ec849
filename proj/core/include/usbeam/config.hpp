#ifndef USBEAM_CONFIG_HPP
#define USBEAM_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "usbeam/acquisition.hpp"
#include "usbeam/beamformer.hpp"
#include "usbeam/bone_probability.hpp"
#include "usbeam/enhancement.hpp"
#include "usbeam/metrics.hpp"
#include "usbeam/simulator.hpp"

namespace usbeam {

enum class AngleMode {
  span,  ///< uniform over [-max_angle, max_angle]
  eq2,   ///< n * lambda / L, centre-most indices
};

/// Everything a pipeline run depends on. SI units and radians internally;
/// the INI form uses mm, MHz and degrees.
struct PipelineConfig {
  ArrayGeometry geometry;
  double fractional_bandwidth = 0.67;

  int angle_count = 73;
  AngleMode angle_mode = AngleMode::span;
  double max_angle = 18.0 * 3.14159265358979323846 / 180.0;

  double x_min = -12e-3, x_max = 12e-3, dx = 0.15e-3;
  double z_min = 8e-3, z_max = 28e-3, dz = 0.05e-3;

  ApodizationSpec apodization;
  double dynamic_range = 60.0;

  BpmConfig bpm;
  AttentionWeights weights;
  MetricsConfig metrics;
  double roi_halfwidth = 0.3e-3;

  std::optional<double> noise_snr_db = 20.0;
  std::uint64_t seed = 0;

  /// Worker threads (0 = hardware). Excluded from the digest: outputs do not depend on it.
  unsigned threads = 0;

  void validate() const;
  PulseModel pulse() const { return {geometry.center_frequency, fractional_bandwidth}; }
  ImagingGrid grid() const { return ImagingGrid::uniform(x_min, x_max, dx, z_min, z_max, dz); }
  std::vector<double> angles() const;

  /// One `key=value` line per field, exact decimal values, fixed order.
  std::string canonical_text() const;
  /// FNV-1a 64 of canonical_text().
  std::uint64_t digest() const;
  std::string digest_hex() const;
};

/// Parses INI text (`[section]` headers, `key = value` lines, `#`/`;` comments) over `base`.
/// Unknown sections or keys are rejected.
PipelineConfig parse_config(std::istream& in, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});
/// INI text that parse_config accepts.
std::string to_ini(const PipelineConfig& config);

}  // namespace usbeam

#endif  // USBEAM_CONFIG_HPP
