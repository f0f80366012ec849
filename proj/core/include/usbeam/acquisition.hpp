#ifndef USBEAM_ACQUISITION_HPP
#define USBEAM_ACQUISITION_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "usbeam/array2d.hpp"

namespace usbeam {

/// Lateral/axial position in meters; z = 0 is the array face, z grows with depth.
struct Point2 {
  double x = 0.0;
  double z = 0.0;
};

/**
 * Uniform linear array. Element k sits at x_k = (k - (N - 1) / 2) * pitch, z = 0,
 * so the aperture is centred on the lateral origin.
 */
struct ArrayGeometry {
  int element_count = 128;
  double pitch = 0.3e-3;              ///< m
  double center_frequency = 7.6e6;    ///< Hz
  double sampling_frequency = 31.25e6;///< Hz
  double sound_speed = 1540.0;        ///< m/s

  double aperture() const { return element_count * pitch; }
  double wavelength() const { return sound_speed / center_frequency; }
  double element_x(int k) const { return (k - 0.5 * (element_count - 1)) * pitch; }

  /// Throws ValidationError naming the first offending field.
  void validate() const;
};

ArrayGeometry make_linear_array(int element_count, double pitch, double center_frequency,
                                double sampling_frequency, double sound_speed);

/// Pixel coordinates; both lists strictly increasing, axial >= 0.
struct ImagingGrid {
  std::vector<double> lateral;
  std::vector<double> axial;

  std::size_t rows() const { return axial.size(); }
  std::size_t cols() const { return lateral.size(); }

  void validate() const;

  /// Inclusive-start grid with the given spacing; the last sample is <= stop (+ half a step).
  static ImagingGrid uniform(double x_min, double x_max, double dx, double z_min, double z_max,
                             double dz);
};

/// One plane-wave transmission: samples is [n_samples x element_count].
struct PlaneWaveFrame {
  double steering_angle = 0.0;  ///< rad
  Array2D<double> samples;
  double t0 = 0.0;  ///< s, time of the first sample

  std::size_t sample_count() const { return samples.rows(); }
};

/// T transmissions sharing one geometry. Read-only after construction.
class RfSweep {
 public:
  RfSweep(ArrayGeometry geometry, std::vector<PlaneWaveFrame> frames)
      : geometry_(geometry), frames_(std::move(frames)) {}

  const ArrayGeometry& geometry() const { return geometry_; }
  const std::vector<PlaneWaveFrame>& frames() const { return frames_; }
  std::size_t size() const { return frames_.size(); }
  const PlaneWaveFrame& operator[](std::size_t i) const { return frames_[i]; }

 private:
  ArrayGeometry geometry_;
  std::vector<PlaneWaveFrame> frames_;
};

/// Steering angles n * lambda / L for the `count` centre-most n in [-N/2, N/2 - 1].
/// Odd counts are symmetric around an exact zero; even counts take the extra
/// index on the negative side, as the index set itself does.
std::vector<double> steering_angle_set(const ArrayGeometry& geometry, int count);

/// `count` angles uniformly spaced over [-max_angle, max_angle]; a single angle is 0.
std::vector<double> uniform_angle_span(int count, double max_angle);

/// Checks the frame/geometry invariants; throws ValidationError naming the frame index.
void validate_sweep(const RfSweep& sweep);

}  // namespace usbeam

#endif  // USBEAM_ACQUISITION_HPP
