#ifndef USBEAM_BEAMFORMER_HPP
#define USBEAM_BEAMFORMER_HPP

#include <span>
#include <vector>

#include "usbeam/acquisition.hpp"
#include "usbeam/array2d.hpp"
#include "usbeam/delays.hpp"

namespace usbeam {

enum class Window { rectangular, hann, tukey };

/// Receive apodization: a window across the array, optionally masked by an f-number.
struct ApodizationSpec {
  Window window = Window::hann;
  double tukey_ratio = 0.5;  ///< taper fraction in [0, 1], used by Window::tukey
  double f_number = 0.0;     ///< 0 = full aperture

  void validate() const;
  /// Window weight per element, independent of the pixel.
  std::vector<double> element_weights(int element_count) const;
};

/// Summed RF before envelope detection; values are [axial x lateral].
struct BeamformedImage {
  ImagingGrid grid;
  Image values;
};

/// Normalized log-compressed envelope in [0, 1].
struct BModeImage {
  ImagingGrid grid;
  Image values;
  double dynamic_range = 60.0;  ///< dB
};

/**
 * Delay-and-sum reconstruction on a fixed grid. Sample lookups interpolate linearly in
 * time; lookups outside the recorded window contribute zero. Rows of the grid are
 * distributed across `threads` workers; the result does not depend on the count.
 */
class DasBeamformer {
 public:
  DasBeamformer(ArrayGeometry geometry, ImagingGrid grid, ApodizationSpec apodization,
                unsigned threads = 0);

  BeamformedImage beamform(const PlaneWaveFrame& frame) const;

  /// Coherent compounding of every frame; bit-identical to compound() over per-frame images.
  BeamformedImage beamform_compound(const RfSweep& sweep) const;

  const ImagingGrid& grid() const { return grid_; }

 private:
  void check_frame(const PlaneWaveFrame& frame) const;
  BeamformedImage run(std::span<const PlaneWaveFrame* const> frames) const;

  ArrayGeometry geometry_;
  ImagingGrid grid_;
  ApodizationSpec apodization_;
  std::vector<double> weights_;
  unsigned threads_;
};

BeamformedImage das_beamform(const PlaneWaveFrame& frame, const ArrayGeometry& geometry,
                             const ImagingGrid& grid, const ApodizationSpec& apodization,
                             unsigned threads = 0);

/// Pixel-wise sum; each pixel's terms are added in ascending order, so the list order
/// does not affect the result.
BeamformedImage compound(std::span<const BeamformedImage> images);

/// Magnitude of the axial analytic signal, column by column.
BeamformedImage envelope_detect(const BeamformedImage& image);

/// Maps 20 log10(v / max) from [-dynamic_range, 0] dB onto [0, 1].
BModeImage log_compress(const BeamformedImage& envelope, double dynamic_range = 60.0);

/// Peak location and half-maximum widths of a point response on an envelope image.
struct PointResponse {
  Point2 peak;
  std::size_t peak_row = 0;
  std::size_t peak_col = 0;
  double lateral_fwhm = 0.0;  ///< m
  double axial_fwhm = 0.0;    ///< m
};

PointResponse measure_point_response(const BeamformedImage& envelope);

}  // namespace usbeam

#endif  // USBEAM_BEAMFORMER_HPP
