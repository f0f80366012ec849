#ifndef USBEAM_IO_HPP
#define USBEAM_IO_HPP

#include <optional>
#include <string>

#include "usbeam/acquisition.hpp"
#include "usbeam/container.hpp"

namespace usbeam {

/// Container kinds written by this library (metadata key "kind").
inline constexpr const char* kKindRfSweep = "rf_sweep";
inline constexpr const char* kKindImage = "image";
inline constexpr const char* kKindDataset = "dataset";

void put_geometry(Container& c, const ArrayGeometry& g);
ArrayGeometry get_geometry(const Container& c);
void put_grid(Container& c, const ImagingGrid& grid);
ImagingGrid get_grid(const Container& c);

/// Frames as arrays "frame.<i>" [n_samples, elements]; angles and t0 in metadata.
Container sweep_to_container(const RfSweep& sweep);
RfSweep sweep_from_container(const Container& c);

/// A 2-D image product with its grid; role is e.g. "bmode", "bpm", "beam", "envelope".
struct StoredImage {
  std::string role;
  ImagingGrid grid;
  Image values;
  std::optional<double> dynamic_range;
};

Container image_to_container(const StoredImage& image);
StoredImage image_from_container(const Container& c);

/// Human-readable summary: header fields, record/frame counts, shapes, digest.
std::string inspect(const Container& c);

}  // namespace usbeam

#endif  // USBEAM_IO_HPP
