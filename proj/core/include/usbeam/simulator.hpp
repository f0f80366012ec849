#ifndef USBEAM_SIMULATOR_HPP
#define USBEAM_SIMULATOR_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "usbeam/acquisition.hpp"

namespace usbeam {

struct PointScatterer {
  Point2 position;
  double reflectivity = 1.0;
};

/// Mirror-like reflector along a polyline. Echoes are attenuated by a Gaussian
/// lobe in the angle between the mirror-reflected wave and the array normal.
struct SpecularSurface {
  std::vector<Point2> polyline;
  double reflectivity = 1.0;
  double angular_falloff = 0.17;  ///< rad, width of the specular lobe
};

/// Scatterers plus specular surfaces; must contain at least one of either.
class Phantom {
 public:
  Phantom(std::vector<PointScatterer> scatterers, std::vector<SpecularSurface> surfaces);

  const std::vector<PointScatterer>& scatterers() const { return scatterers_; }
  const std::vector<SpecularSurface>& surfaces() const { return surfaces_; }

  /// Deepest z over all scatterers and surface vertices.
  double max_depth() const;

 private:
  std::vector<PointScatterer> scatterers_;
  std::vector<SpecularSurface> surfaces_;
};

/// Gaussian-modulated cosine, peak at t = 0. Bandwidth is the -6 dB fractional width.
struct PulseModel {
  double center_frequency = 7.6e6;
  double fractional_bandwidth = 0.67;

  void validate() const;
  double operator()(double t) const;
  /// |t| beyond which the envelope is below -80 dB; the pulse is truncated there.
  double half_duration() const;
};

/// Echo gain of one surface segment for a plane wave steered at `angle`.
double specular_gain(Point2 a, Point2 b, double angle, double angular_falloff);

PlaneWaveFrame simulate_frame(const Phantom& phantom, const ArrayGeometry& geometry, double angle,
                              const PulseModel& pulse, std::size_t n_samples);

/// Smallest n_samples that holds every echo of the phantom at this angle.
std::size_t required_samples(const Phantom& phantom, const ArrayGeometry& geometry, double angle,
                             const PulseModel& pulse);

RfSweep simulate_sweep(const Phantom& phantom, const ArrayGeometry& geometry,
                       std::span<const double> angles, const PulseModel& pulse,
                       std::size_t n_samples, unsigned threads = 1);

/// Adds white Gaussian noise at the requested SNR (signal power = mean square of the frame).
PlaneWaveFrame add_noise(const PlaneWaveFrame& frame, double snr_db, std::uint64_t seed);

/// Uniformly placed scatterers with Gaussian reflectivities, reproducible for a seed.
std::vector<PointScatterer> speckle_region(double x_min, double x_max, double z_min, double z_max,
                                           double density_per_m2, double amplitude,
                                           std::uint64_t seed);

/// Curved specular bone surface over tissue speckle with a hypoechoic shadow below it.
Phantom make_bone_phantom(std::uint64_t seed);

}  // namespace usbeam

#endif  // USBEAM_SIMULATOR_HPP
