#include "usbeam/io.hpp"

#include <sstream>

#include "usbeam/error.hpp"

namespace usbeam {
namespace {

std::string shape_text(const FloatArray& a) {
  std::string s;
  for (std::size_t i = 0; i < a.shape.size(); ++i) {
    if (i) s += " x ";
    s += std::to_string(a.shape[i]);
  }
  return s;
}

}  // namespace

void put_geometry(Container& c, const ArrayGeometry& g) {
  c.set("geometry.element_count", std::to_string(g.element_count));
  c.set("geometry.pitch", format_exact(g.pitch));
  c.set("geometry.center_frequency", format_exact(g.center_frequency));
  c.set("geometry.sampling_frequency", format_exact(g.sampling_frequency));
  c.set("geometry.sound_speed", format_exact(g.sound_speed));
}

ArrayGeometry get_geometry(const Container& c) {
  ArrayGeometry g;
  g.element_count = static_cast<int>(c.get_int("geometry.element_count"));
  g.pitch = c.get_double("geometry.pitch");
  g.center_frequency = c.get_double("geometry.center_frequency");
  g.sampling_frequency = c.get_double("geometry.sampling_frequency");
  g.sound_speed = c.get_double("geometry.sound_speed");
  g.validate();
  return g;
}

void put_grid(Container& c, const ImagingGrid& grid) {
  c.set("grid.lateral", format_list(grid.lateral));
  c.set("grid.axial", format_list(grid.axial));
}

ImagingGrid get_grid(const Container& c) {
  ImagingGrid grid{parse_list(c.get("grid.lateral")), parse_list(c.get("grid.axial"))};
  grid.validate();
  return grid;
}

Container sweep_to_container(const RfSweep& sweep) {
  validate_sweep(sweep);
  Container c;
  c.set("kind", kKindRfSweep);
  put_geometry(c, sweep.geometry());
  c.set("frame_count", std::to_string(sweep.size()));
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const auto& f = sweep[i];
    const std::string p = "frame." + std::to_string(i);
    c.set(p + ".angle", format_exact(f.steering_angle));
    c.set(p + ".t0", format_exact(f.t0));
    c.add_array(p, FloatArray::from_image(f.samples));
  }
  return c;
}

RfSweep sweep_from_container(const Container& c) {
  if (c.get("kind") != kKindRfSweep) throw FormatError("container kind is not rf_sweep");
  const ArrayGeometry g = get_geometry(c);
  const auto count = c.get_int("frame_count");
  if (count < 0) throw FormatError("negative frame_count");
  std::vector<PlaneWaveFrame> frames;
  for (std::int64_t i = 0; i < count; ++i) {
    const std::string p = "frame." + std::to_string(i);
    frames.push_back({c.get_double(p + ".angle"), c.array(p).to_image(), c.get_double(p + ".t0")});
  }
  RfSweep sweep(g, std::move(frames));
  validate_sweep(sweep);
  return sweep;
}

Container image_to_container(const StoredImage& image) {
  image.grid.validate();
  if (image.values.rows() != image.grid.rows() || image.values.cols() != image.grid.cols()) {
    throw ValidationError("image shape does not match its grid");
  }
  Container c;
  c.set("kind", kKindImage);
  c.set("role", image.role);
  if (image.dynamic_range) c.set("dynamic_range", format_exact(*image.dynamic_range));
  put_grid(c, image.grid);
  c.add_array("values", FloatArray::from_image(image.values));
  return c;
}

StoredImage image_from_container(const Container& c) {
  if (c.get("kind") != kKindImage) throw FormatError("container kind is not image");
  StoredImage img;
  img.role = c.get("role");
  if (c.find("dynamic_range")) img.dynamic_range = c.get_double("dynamic_range");
  img.grid = get_grid(c);
  img.values = c.array("values").to_image();
  if (img.values.rows() != img.grid.rows() || img.values.cols() != img.grid.cols()) {
    throw FormatError("image array shape does not match its grid");
  }
  return img;
}

std::string inspect(const Container& c) {
  std::ostringstream out;
  const std::string kind = c.find("kind").value_or("unknown");
  out << "format USBF1 version " << Container::kVersion << "\n";
  out << "kind " << kind << "\n";
  if (c.find("geometry.element_count")) {
    const ArrayGeometry g = get_geometry(c);
    out << "geometry elements=" << g.element_count << " pitch_mm=" << g.pitch * 1e3
        << " f0_mhz=" << g.center_frequency / 1e6 << " fs_mhz=" << g.sampling_frequency / 1e6
        << " c=" << g.sound_speed << "\n";
  }
  if (kind == kKindRfSweep) {
    out << "angle_count " << c.get("frame_count") << "\n";
    if (const auto* first = c.find_array("frame.0")) {
      out << "frame_shape " << shape_text(*first) << " (samples x elements)\n";
    }
  } else if (kind == kKindDataset) {
    out << "record_count " << c.get("record_count") << "\n";
    out << "config_digest " << c.get("config_digest") << "\n";
  } else if (kind == kKindImage) {
    out << "role " << c.get("role") << "\n";
  }
  if (c.find("grid.lateral")) {
    const ImagingGrid grid = get_grid(c);
    out << "grid " << grid.rows() << " x " << grid.cols() << " (axial x lateral)\n";
  }
  out << "metadata_entries " << c.metadata().size() << "\n";
  out << "arrays " << c.arrays().size() << "\n";
  for (const auto& [name, a] : c.arrays()) out << "  " << name << " [" << shape_text(a) << "]\n";
  return out.str();
}

}  // namespace usbeam
