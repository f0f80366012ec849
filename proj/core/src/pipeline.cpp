#include "usbeam/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "usbeam/error.hpp"
#include "usbeam/pgm.hpp"
#include "usbeam/phantom_io.hpp"

namespace usbeam {
namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

std::uint64_t noise_seed(std::uint64_t seed, std::size_t frame) {
  // splitmix64 finalizer over (seed, frame)
  std::uint64_t z = seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(frame) + 1;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::size_t acquisition_samples(const PipelineConfig& config, const Phantom& phantom) {
  const auto& g = config.geometry;
  const PulseModel pulse = config.pulse();
  std::size_t n = 0;
  for (double a : config.angles()) n = std::max(n, required_samples(phantom, g, a, pulse));
  // Deepest pixel at the widest lateral offset: round trip plus lateral detour.
  const double reach = std::max(std::abs(config.x_min), std::abs(config.x_max)) + g.aperture() / 2;
  const double t = (2.0 * config.z_max + 2.0 * reach) / g.sound_speed + pulse.half_duration();
  return std::max(n, static_cast<std::size_t>(std::ceil(t * g.sampling_frequency)) + 2);
}

RfSweep simulate_acquisition(const PipelineConfig& config, const Phantom& phantom) {
  config.validate();
  const auto n = acquisition_samples(config, phantom);
  RfSweep clean = simulate_sweep(phantom, config.geometry, config.angles(), config.pulse(), n, config.threads);
  if (!config.noise_snr_db) return clean;
  std::vector<PlaneWaveFrame> frames = clean.frames();
  for (std::size_t j = 0; j < frames.size(); ++j) {
    frames[j] = add_noise(frames[j], *config.noise_snr_db, noise_seed(config.seed, j));
  }
  return RfSweep(config.geometry, std::move(frames));
}

const PlaneWaveFrame& broadside_frame(const RfSweep& sweep) {
  const auto& frames = sweep.frames();
  if (frames.empty()) throw ValidationError("sweep has no frames");
  const auto it = std::min_element(frames.begin(), frames.end(), [](const auto& a, const auto& b) {
    return std::abs(a.steering_angle) < std::abs(b.steering_angle);
  });
  return *it;
}

PipelineResult run_pipeline(const PipelineConfig& config, const Phantom& phantom) {
  stage("config", [&] {
    config.validate();
    return 0;
  });
  PipelineResult result;
  result.grid = config.grid();
  result.angles = config.angles();
  RfSweep sweep = stage("simulate", [&] { return simulate_acquisition(config, phantom); });
  result.n_samples = sweep.frames().front().samples.rows();
  result.spw_frame = stage("simulate", [&] {
    const PlaneWaveFrame& f = broadside_frame(sweep);
    if (f.steering_angle == 0.0) return f;
    PlaneWaveFrame g = simulate_frame(phantom, config.geometry, 0.0, config.pulse(), result.n_samples);
    if (config.noise_snr_db) g = add_noise(g, *config.noise_snr_db, noise_seed(config.seed, result.angles.size()));
    return g;
  });

  stage("beamform", [&] {
    const DasBeamformer beamformer(config.geometry, result.grid, config.apodization, config.threads);
    result.spw_envelope = envelope_detect(beamformer.beamform(result.spw_frame));
    result.cpwc_envelope = envelope_detect(beamformer.beamform_compound(sweep));
    result.spw_bmode = log_compress(result.spw_envelope, config.dynamic_range);
    result.cpwc_bmode = log_compress(result.cpwc_envelope, config.dynamic_range);
    result.spw_point = measure_point_response(result.spw_envelope);
    result.cpwc_point = measure_point_response(result.cpwc_envelope);
    return 0;
  });

  // The map works on the linear envelope scaled to unit peak, not the log display image.
  result.bpm = stage("bpm", [&] {
    return bone_probability_map(rescale_to_unit_max(result.cpwc_envelope.values), config.bpm);
  });
  result.beam = stage("enhance", [&] { return beam_enhance(result.cpwc_bmode.values, result.bpm, config.weights); });

  stage("metrics", [&] {
    const Mask foreground = phantom_foreground(phantom, result.grid, config.roi_halfwidth);
    result.roi = make_background(foreground, config.metrics.dilation_radius);
    const Image& target = result.beam.values;
    result.spw_metrics = evaluate(result.spw_bmode.values, &target, result.roi, config.metrics);
    result.cpwc_metrics = evaluate(result.cpwc_bmode.values, &target, result.roi, config.metrics);
    result.beam_metrics = evaluate(target, nullptr, result.roi, config.metrics);
    return 0;
  });
  return result;
}

std::vector<std::string> pipeline_output_names() {
  return {"spw_bmode.pgm", "cpwc_bmode.pgm", "bpm.pgm", "beam.pgm", "metrics.txt"};
}

std::string pipeline_report(const PipelineResult& r, const PipelineConfig& config) {
  std::string out;
  out += "config_digest " + config.digest_hex() + "\n";
  out += "angle_count " + std::to_string(r.angles.size()) + "\n";
  out += "n_samples " + std::to_string(r.n_samples) + "\n";
  out += "grid " + std::to_string(r.grid.rows()) + " " + std::to_string(r.grid.cols()) + "\n";
  out += "otsu_threshold " + fmt(otsu_threshold(r.bpm.values).threshold) + "\n";
  auto point = [&](const std::string& p, const PointResponse& pr) {
    out += p + "peak_x_mm " + fmt(pr.peak.x * 1e3) + "\n";
    out += p + "peak_z_mm " + fmt(pr.peak.z * 1e3) + "\n";
    out += p + "lateral_fwhm_mm " + fmt(pr.lateral_fwhm * 1e3) + "\n";
    out += p + "axial_fwhm_mm " + fmt(pr.axial_fwhm * 1e3) + "\n";
  };
  point("spw.", r.spw_point);
  point("cpwc.", r.cpwc_point);
  out += format_report(r.spw_metrics, "spw.");
  out += format_report(r.cpwc_metrics, "cpwc.");
  out += format_report(r.beam_metrics, "beam.");
  return out;
}

void write_pipeline_outputs(const PipelineResult& result, const PipelineConfig& config,
                            const std::filesystem::path& out_dir) {
  stage("write", [&] {
    std::filesystem::create_directories(out_dir);
    const auto names = pipeline_output_names();
    write_pgm16(out_dir / names[0], result.spw_bmode.values);
    write_pgm16(out_dir / names[1], result.cpwc_bmode.values);
    write_pgm16(out_dir / names[2], result.bpm.values);
    write_pgm16(out_dir / names[3], result.beam.clamped());
    std::ofstream report(out_dir / names[4], std::ios::binary | std::ios::trunc);
    if (!report) throw std::runtime_error("cannot write " + (out_dir / names[4]).string());
    report << pipeline_report(result, config);
    return 0;
  });
}

}  // namespace usbeam
