#include "usbeam/dataset.hpp"

#include "usbeam/error.hpp"
#include "usbeam/io.hpp"
#include "usbeam/pipeline.hpp"

namespace usbeam {
namespace {

Image quantize(Image image) {
  for (double& v : image.values()) v = static_cast<double>(static_cast<float>(v));
  return image;
}

void check_record(const DatasetRecord& r, const Dataset& d, std::size_t index) {
  const std::string where = "record " + std::to_string(index) + ": ";
  if (r.spw_rf.samples.cols() != static_cast<std::size_t>(d.geometry.element_count)) {
    throw ValidationError(where + "RF columns do not match the geometry");
  }
  const auto rows = d.grid.rows();
  const auto cols = d.grid.cols();
  for (const auto* img : {&r.beam_target, &r.bpm}) {
    if (img->rows() != rows || img->cols() != cols) throw ValidationError(where + "image shape does not match the grid");
  }
  if (r.roi.foreground.rows() != rows || r.roi.foreground.cols() != cols ||
      !r.roi.foreground.same_shape(r.roi.background)) {
    throw ValidationError(where + "ROI shape does not match the grid");
  }
}

}  // namespace

Dataset build_dataset(const PipelineConfig& config, const std::vector<NamedPhantom>& phantoms) {
  if (phantoms.empty()) throw ValidationError("dataset needs at least one phantom");
  Dataset d{config.geometry, config.grid(), config.digest_hex(), {}};
  for (const auto& p : phantoms) {
    const PipelineResult r = run_pipeline(config, p.phantom);
    DatasetRecord rec;
    rec.name = p.name;
    rec.spw_rf = r.spw_frame;
    rec.spw_rf.samples = quantize(std::move(rec.spw_rf.samples));
    rec.beam_target = quantize(r.beam.clamped());
    rec.bpm = quantize(r.bpm.values);
    rec.roi = r.roi;
    check_record(rec, d, d.records.size());
    d.records.push_back(std::move(rec));
  }
  return d;
}

Container dataset_to_container(const Dataset& d) {
  Container c;
  c.set("kind", kKindDataset);
  c.set("record_count", std::to_string(d.records.size()));
  c.set("config_digest", d.config_digest);
  put_geometry(c, d.geometry);
  put_grid(c, d.grid);
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    const auto& r = d.records[i];
    check_record(r, d, i);
    const std::string p = "record." + std::to_string(i);
    c.set(p + ".name", r.name);
    c.set(p + ".angle", format_exact(r.spw_rf.steering_angle));
    c.set(p + ".t0", format_exact(r.spw_rf.t0));
  }
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    const auto& r = d.records[i];
    const std::string p = "record." + std::to_string(i);
    c.add_array(p + ".spw_rf", FloatArray::from_image(r.spw_rf.samples));
    c.add_array(p + ".beam_target", FloatArray::from_image(r.beam_target));
    c.add_array(p + ".bpm", FloatArray::from_image(r.bpm));
    c.add_array(p + ".roi_foreground", FloatArray::from_mask(r.roi.foreground));
    c.add_array(p + ".roi_background", FloatArray::from_mask(r.roi.background));
  }
  return c;
}

Dataset dataset_from_container(const Container& c) {
  if (c.get("kind") != kKindDataset) throw FormatError("container kind is not dataset");
  Dataset d;
  d.geometry = get_geometry(c);
  d.grid = get_grid(c);
  d.config_digest = c.get("config_digest");
  const auto count = c.get_int("record_count");
  if (count < 0) throw FormatError("negative record_count");
  for (std::int64_t i = 0; i < count; ++i) {
    const std::string p = "record." + std::to_string(i);
    DatasetRecord r;
    r.name = c.get(p + ".name");
    r.spw_rf = {c.get_double(p + ".angle"), c.array(p + ".spw_rf").to_image(), c.get_double(p + ".t0")};
    r.beam_target = c.array(p + ".beam_target").to_image();
    r.bpm = c.array(p + ".bpm").to_image();
    r.roi = {c.array(p + ".roi_foreground").to_mask(), c.array(p + ".roi_background").to_mask()};
    try {
      check_record(r, d, static_cast<std::size_t>(i));
    } catch (const ValidationError& e) {
      throw FormatError(e.what());
    }
    d.records.push_back(std::move(r));
  }
  return d;
}

void export_dataset(const PipelineConfig& config, const std::vector<NamedPhantom>& phantoms,
                    const std::filesystem::path& out_path) {
  save_container(out_path, dataset_to_container(build_dataset(config, phantoms)));
}

}  // namespace usbeam
