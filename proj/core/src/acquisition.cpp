#include "usbeam/acquisition.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "usbeam/error.hpp"

namespace usbeam {
namespace {

void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ValidationError(std::string(field) + " must be a positive finite value, got " +
                          std::to_string(value));
  }
}

void require_increasing(const std::vector<double>& v, const char* field) {
  if (v.empty()) throw ValidationError(std::string(field) + " must not be empty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw ValidationError(std::string(field) + " contains a non-finite value");
    if (i > 0 && !(v[i] > v[i - 1])) {
      throw ValidationError(std::string(field) + " must be strictly increasing (index " +
                            std::to_string(i) + ")");
    }
  }
}

}  // namespace

void ArrayGeometry::validate() const {
  if (element_count < 2) {
    throw ValidationError("element_count must be >= 2, got " + std::to_string(element_count));
  }
  require_positive(pitch, "pitch");
  require_positive(center_frequency, "center_frequency");
  require_positive(sampling_frequency, "sampling_frequency");
  require_positive(sound_speed, "sound_speed");
  if (!(sampling_frequency > 2.0 * center_frequency)) {
    throw ValidationError("sampling_frequency must exceed 2 * center_frequency (Nyquist)");
  }
}

ArrayGeometry make_linear_array(int element_count, double pitch, double center_frequency,
                                double sampling_frequency, double sound_speed) {
  ArrayGeometry g{element_count, pitch, center_frequency, sampling_frequency, sound_speed};
  g.validate();
  return g;
}

void ImagingGrid::validate() const {
  require_increasing(lateral, "lateral_positions");
  require_increasing(axial, "axial_positions");
  if (axial.front() < 0.0) throw ValidationError("axial_positions must be >= 0");
}

ImagingGrid ImagingGrid::uniform(double x_min, double x_max, double dx, double z_min,
                                 double z_max, double dz) {
  require_positive(dx, "lateral spacing");
  require_positive(dz, "axial spacing");
  if (!(x_max >= x_min) || !(z_max >= z_min)) throw ValidationError("grid bounds are inverted");
  ImagingGrid grid;
  const auto nx = static_cast<std::size_t>(std::floor((x_max - x_min) / dx + 0.5)) + 1;
  const auto nz = static_cast<std::size_t>(std::floor((z_max - z_min) / dz + 0.5)) + 1;
  grid.lateral.reserve(nx);
  grid.axial.reserve(nz);
  for (std::size_t i = 0; i < nx; ++i) grid.lateral.push_back(x_min + static_cast<double>(i) * dx);
  for (std::size_t i = 0; i < nz; ++i) grid.axial.push_back(z_min + static_cast<double>(i) * dz);
  grid.validate();
  return grid;
}

std::vector<double> steering_angle_set(const ArrayGeometry& geometry, int count) {
  geometry.validate();
  if (count < 1 || count > geometry.element_count) {
    throw ValidationError("angle count must be in [1, element_count], got " + std::to_string(count));
  }
  const double step = geometry.wavelength() / geometry.aperture();
  // Centre-most window of the index set [-N/2, N/2 - 1].
  const int first = -(count / 2);
  std::vector<double> angles;
  angles.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) angles.push_back((first + i) * step);
  return angles;
}

std::vector<double> uniform_angle_span(int count, double max_angle) {
  if (count < 1) throw ValidationError("angle count must be >= 1");
  if (!(max_angle >= 0.0) || !(max_angle < std::numbers::pi / 2)) {
    throw ValidationError("max_angle must be in [0, pi/2)");
  }
  if (count == 1) return {0.0};
  std::vector<double> angles;
  angles.reserve(static_cast<std::size_t>(count));
  const double step = 2.0 * max_angle / (count - 1);
  for (int i = 0; i < count; ++i) angles.push_back(-max_angle + i * step);
  if (count % 2 == 1) angles[static_cast<std::size_t>(count / 2)] = 0.0;
  return angles;
}

void validate_sweep(const RfSweep& sweep) {
  sweep.geometry().validate();
  const auto& frames = sweep.frames();
  if (frames.empty()) throw ValidationError("sweep has no transmissions");
  const auto columns = static_cast<std::size_t>(sweep.geometry().element_count);
  const std::size_t samples = frames.front().sample_count();
  std::set<double> seen;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    const std::string where = "frame " + std::to_string(i) + ": ";
    if (f.samples.cols() != columns) {
      throw ValidationError(where + "has " + std::to_string(f.samples.cols()) +
                            " columns, geometry has " + std::to_string(columns) + " elements");
    }
    if (f.sample_count() == 0) throw ValidationError(where + "has no samples");
    if (f.sample_count() != samples) throw ValidationError(where + "sample count differs from frame 0");
    if (!(std::abs(f.steering_angle) < std::numbers::pi / 2)) {
      throw ValidationError(where + "|steering_angle| must be < pi/2");
    }
    if (!std::isfinite(f.t0)) throw ValidationError(where + "t0 is not finite");
    if (!seen.insert(f.steering_angle).second) {
      throw ValidationError(where + "duplicate steering angle");
    }
  }
}

}  // namespace usbeam
