// usbeam: command-line front end for the simulate -> beamform -> BPM -> enhance -> evaluate chain.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "usbeam/config.hpp"
#include "usbeam/container.hpp"
#include "usbeam/dataset.hpp"
#include "usbeam/error.hpp"
#include "usbeam/io.hpp"
#include "usbeam/pgm.hpp"
#include "usbeam/phantom_io.hpp"
#include "usbeam/pipeline.hpp"

namespace {

using namespace usbeam;

/// Flags shared by most subcommands; unset values leave the config file untouched.
struct CommonFlags {
  std::string config_path;
  std::optional<int> angles;
  std::optional<std::uint64_t> seed;
  std::string weights;
  std::optional<double> dynamic_range;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "INI config file")->check(CLI::ExistingFile);
  cmd->add_option("--angles", f.angles, "number of steering angles");
  cmd->add_option("--seed", f.seed, "noise seed");
  cmd->add_option("--weights", f.weights, "attention weights alpha,beta,gamma");
  cmd->add_option("--dynamic-range", f.dynamic_range, "B-mode dynamic range in dB");
  cmd->add_option("--threads", f.threads, "worker threads (0 = all cores)");
}

PipelineConfig resolve_config(const CommonFlags& f) {
  PipelineConfig c = f.config_path.empty() ? PipelineConfig{} : load_config(f.config_path);
  if (f.angles) c.angle_count = *f.angles;
  if (f.seed) c.seed = *f.seed;
  if (f.dynamic_range) c.dynamic_range = *f.dynamic_range;
  if (f.threads) c.threads = *f.threads;
  if (!f.weights.empty()) {
    const auto w = parse_list(f.weights);
    if (w.size() != 3) throw ValidationError("--weights expects alpha,beta,gamma");
    c.weights = {w[0], w[1], w[2]};
  }
  c.validate();
  return c;
}

StoredImage load_image(const std::string& path, const char* role) {
  StoredImage img = image_from_container(load_container(path));
  if (role && img.role != role) {
    throw ValidationError(path + ": expected a " + role + " image, found " + img.role);
  }
  return img;
}

void save_image(const StoredImage& img, const std::string& out, const std::string& pgm) {
  save_container(out, image_to_container(img));
  if (!pgm.empty()) write_pgm16(pgm, img.values);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plane-wave ultrasound beamforming and bone enhancement"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string phantom_path, in_path, out_path, pgm_path, bpm_path, reference_path, envelope_path;
  std::vector<std::string> phantom_paths;
  bool spw = false;

  auto* simulate = app.add_subcommand("simulate", "simulate a plane-wave RF sweep");
  add_common(simulate, flags);
  simulate->add_option("--phantom", phantom_path, "phantom description")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out_path, "RF container")->required();

  auto* beamform = app.add_subcommand("beamform", "DAS beamform an RF sweep into a B-mode image");
  add_common(beamform, flags);
  beamform->add_option("--in", in_path, "RF container")->required()->check(CLI::ExistingFile);
  beamform->add_option("--out", out_path, "B-mode image container")->required();
  beamform->add_option("--pgm", pgm_path, "also write a 16-bit PGM");
  beamform->add_flag("--spw", spw, "use only the frame closest to 0 degrees");
  beamform->add_option("--envelope", envelope_path, "also write the linear envelope container");

  auto* bpm = app.add_subcommand("bpm", "compute the bone probability map of an envelope or B-mode image");
  add_common(bpm, flags);
  bpm->add_option("--in", in_path, "envelope or B-mode image container")->required()->check(CLI::ExistingFile);
  bpm->add_option("--out", out_path, "BPM image container")->required();
  bpm->add_option("--pgm", pgm_path, "also write a 16-bit PGM");

  auto* enhance = app.add_subcommand("enhance", "blend a B-mode image with its gated BPM");
  add_common(enhance, flags);
  enhance->add_option("--in", in_path, "B-mode image container")->required()->check(CLI::ExistingFile);
  enhance->add_option("--bpm", bpm_path, "BPM image container")->required()->check(CLI::ExistingFile);
  enhance->add_option("--out", out_path, "enhanced image container")->required();
  enhance->add_option("--pgm", pgm_path, "also write a 16-bit PGM (clamped)");

  auto* metrics = app.add_subcommand("metrics", "CR/SNR on the phantom ROI, similarity against a reference");
  add_common(metrics, flags);
  metrics->add_option("--in", in_path, "image container")->required()->check(CLI::ExistingFile);
  metrics->add_option("--phantom", phantom_path, "phantom defining the ROI")->required()->check(CLI::ExistingFile);
  metrics->add_option("--reference", reference_path, "reference image container")->check(CLI::ExistingFile);

  auto* pipeline = app.add_subcommand("pipeline", "run every stage and write images plus a report");
  add_common(pipeline, flags);
  pipeline->add_option("--phantom", phantom_path, "phantom description")->required()->check(CLI::ExistingFile);
  pipeline->add_option("--out", out_path, "output directory")->required();

  auto* export_ds = app.add_subcommand("export-dataset", "write paired training records, one per phantom");
  add_common(export_ds, flags);
  export_ds->add_option("--phantom", phantom_paths, "phantom descriptions (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  export_ds->add_option("--out", out_path, "dataset container")->required();

  auto* inspect_cmd = app.add_subcommand("inspect", "summarize a container file");
  inspect_cmd->add_option("file", in_path, "container")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*inspect_cmd) {
      std::cout << inspect(load_container(in_path));
      return 0;
    }
    const PipelineConfig config = resolve_config(flags);

    if (*simulate) {
      const RfSweep sweep = simulate_acquisition(config, load_phantom(phantom_path));
      save_container(out_path, sweep_to_container(sweep));
    } else if (*beamform) {
      const RfSweep sweep = sweep_from_container(load_container(in_path));
      const DasBeamformer das(sweep.geometry(), config.grid(), config.apodization, config.threads);
      const BeamformedImage rf = spw ? das.beamform(broadside_frame(sweep)) : das.beamform_compound(sweep);
      const BeamformedImage envelope = envelope_detect(rf);
      if (!envelope_path.empty()) {
        save_container(envelope_path, image_to_container({"envelope", envelope.grid, envelope.values, std::nullopt}));
      }
      const BModeImage bmode = log_compress(envelope, config.dynamic_range);
      save_image({"bmode", bmode.grid, bmode.values, bmode.dynamic_range}, out_path, pgm_path);
    } else if (*bpm) {
      const StoredImage input = load_image(in_path, nullptr);
      const Image normalized = input.role == "envelope" ? rescale_to_unit_max(input.values) : input.values;
      const BoneProbabilityMap map = bone_probability_map(normalized, config.bpm);
      save_image({"bpm", input.grid, map.values, std::nullopt}, out_path, pgm_path);
    } else if (*enhance) {
      const StoredImage bmode = load_image(in_path, "bmode");
      const StoredImage map = load_image(bpm_path, "bpm");
      const EnhancedImage beam = beam_enhance(bmode.values, BoneProbabilityMap{map.values}, config.weights);
      save_container(out_path, image_to_container({"beam", bmode.grid, beam.values, std::nullopt}));
      if (!pgm_path.empty()) write_pgm16(pgm_path, beam.clamped());
    } else if (*metrics) {
      const StoredImage image = load_image(in_path, nullptr);
      const Mask fg = phantom_foreground(load_phantom(phantom_path), image.grid, config.roi_halfwidth);
      const RoiMask roi = make_background(fg, config.metrics.dilation_radius);
      std::optional<StoredImage> ref;
      if (!reference_path.empty()) ref = load_image(reference_path, nullptr);
      std::cout << format_report(evaluate(image.values, ref ? &ref->values : nullptr, roi, config.metrics));
    } else if (*pipeline) {
      const PipelineResult result = run_pipeline(config, load_phantom(phantom_path));
      write_pipeline_outputs(result, config, out_path);
      std::cout << pipeline_report(result, config);
    } else if (*export_ds) {
      std::vector<NamedPhantom> phantoms;
      for (const auto& p : phantom_paths) phantoms.push_back({p, load_phantom(p)});
      export_dataset(config, phantoms, out_path);
      std::cout << "records " << phantoms.size() << "\n";
    }
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return 3;
  } catch (const StageError& e) {
    std::cerr << "stage error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
