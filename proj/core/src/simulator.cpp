#include "usbeam/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "usbeam/delays.hpp"
#include "usbeam/error.hpp"
#include "usbeam/parallel.hpp"

namespace usbeam {
namespace {

struct Target {
  Point2 position;
  double amplitude;
};

// Surfaces are sampled at a quarter wavelength; each sample is a point
// reflector weighted by its segment's specular gain.
std::vector<Target> expand_targets(const Phantom& phantom, const ArrayGeometry& geometry,
                                   double angle) {
  std::vector<Target> targets;
  targets.reserve(phantom.scatterers().size());
  for (const auto& s : phantom.scatterers()) targets.push_back({s.position, s.reflectivity});

  const double spacing = geometry.wavelength() / 4.0;
  for (const auto& surface : phantom.surfaces()) {
    const auto& line = surface.polyline;
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
      const Point2 a = line[i];
      const Point2 b = line[i + 1];
      const double length = std::hypot(b.x - a.x, b.z - a.z);
      if (length == 0.0) continue;
      const double gain =
          surface.reflectivity * specular_gain(a, b, angle, surface.angular_falloff);
      const auto steps = static_cast<std::size_t>(std::ceil(length / spacing));
      // Half-open per segment so shared vertices are not counted twice.
      for (std::size_t s = 0; s < steps; ++s) {
        const double u = (static_cast<double>(s) + 0.5) / static_cast<double>(steps);
        targets.push_back({{a.x + u * (b.x - a.x), a.z + u * (b.z - a.z)}, gain});
      }
    }
  }
  return targets;
}

double latest_arrival(const std::vector<Target>& targets, const ArrayGeometry& geometry,
                      double angle) {
  const double c = geometry.sound_speed;
  const double x_first = geometry.element_x(0);
  const double x_last = geometry.element_x(geometry.element_count - 1);
  double latest = 0.0;
  for (const auto& t : targets) {
    const double tx = transmit_delay(t.position, angle, c);
    const double rx = std::max(receive_delay(t.position, x_first, c),
                               receive_delay(t.position, x_last, c));
    latest = std::max(latest, tx + rx);
  }
  return latest;
}

}  // namespace

Phantom::Phantom(std::vector<PointScatterer> scatterers, std::vector<SpecularSurface> surfaces)
    : scatterers_(std::move(scatterers)), surfaces_(std::move(surfaces)) {
  if (scatterers_.empty() && surfaces_.empty()) {
    throw ValidationError("phantom must contain at least one scatterer or surface");
  }
  for (std::size_t i = 0; i < scatterers_.size(); ++i) {
    const auto& s = scatterers_[i];
    if (!(s.position.z > 0.0) || !std::isfinite(s.position.x) || !std::isfinite(s.position.z)) {
      throw ValidationError("scatterer " + std::to_string(i) + ": position must be finite with z > 0");
    }
    if (!std::isfinite(s.reflectivity)) {
      throw ValidationError("scatterer " + std::to_string(i) + ": reflectivity must be finite");
    }
  }
  for (std::size_t i = 0; i < surfaces_.size(); ++i) {
    const auto& s = surfaces_[i];
    const std::string where = "surface " + std::to_string(i) + ": ";
    if (s.polyline.size() < 2) throw ValidationError(where + "polyline needs >= 2 points");
    for (const auto& p : s.polyline) {
      if (!(p.z > 0.0) || !std::isfinite(p.x) || !std::isfinite(p.z)) {
        throw ValidationError(where + "vertices must be finite with z > 0");
      }
    }
    if (!std::isfinite(s.reflectivity)) throw ValidationError(where + "reflectivity must be finite");
    if (!(s.angular_falloff > 0.0) || !std::isfinite(s.angular_falloff)) {
      throw ValidationError(where + "angular_falloff must be > 0");
    }
  }
}

double Phantom::max_depth() const {
  double depth = 0.0;
  for (const auto& s : scatterers_) depth = std::max(depth, s.position.z);
  for (const auto& s : surfaces_) {
    for (const auto& p : s.polyline) depth = std::max(depth, p.z);
  }
  return depth;
}

void PulseModel::validate() const {
  if (!(center_frequency > 0.0) || !std::isfinite(center_frequency)) {
    throw ValidationError("pulse center_frequency must be > 0");
  }
  if (!(fractional_bandwidth > 0.0 && fractional_bandwidth < 2.0)) {
    throw ValidationError("pulse fractional_bandwidth must be in (0, 2)");
  }
}

namespace {

// exp(-a t^2) falls to -6 dB at the band edges f0 (1 +- B/2).
double envelope_rate(const PulseModel& p) {
  const double ref = std::pow(10.0, -6.0 / 20.0);
  const double w = std::numbers::pi * p.center_frequency * p.fractional_bandwidth;
  return -(w * w) / (4.0 * std::log(ref));
}

}  // namespace

double PulseModel::operator()(double t) const {
  return std::exp(-envelope_rate(*this) * t * t) *
         std::cos(2.0 * std::numbers::pi * center_frequency * t);
}

double PulseModel::half_duration() const {
  return std::sqrt(std::log(1e4) / envelope_rate(*this));
}

double specular_gain(Point2 a, Point2 b, double angle, double angular_falloff) {
  const double length = std::hypot(b.x - a.x, b.z - a.z);
  if (length == 0.0) return 0.0;
  // Unit normal facing the array (negative z).
  double nx = -(b.z - a.z) / length;
  double nz = (b.x - a.x) / length;
  if (nz > 0.0) {
    nx = -nx;
    nz = -nz;
  }
  const double dx = std::sin(angle);
  const double dz = std::cos(angle);
  const double dot = dx * nx + dz * nz;
  const double rx = dx - 2.0 * dot * nx;
  const double rz = dz - 2.0 * dot * nz;
  // Deviation of the mirror direction from straight back to the array (0, -1).
  const double cosine = std::clamp(-rz / std::hypot(rx, rz), -1.0, 1.0);
  const double mismatch = std::acos(cosine);
  const double r = mismatch / angular_falloff;
  return std::exp(-r * r);
}

std::size_t required_samples(const Phantom& phantom, const ArrayGeometry& geometry, double angle,
                             const PulseModel& pulse) {
  const auto targets = expand_targets(phantom, geometry, angle);
  const double t_end = latest_arrival(targets, geometry, angle) + pulse.half_duration();
  return static_cast<std::size_t>(std::ceil(t_end * geometry.sampling_frequency)) + 2;
}

PlaneWaveFrame simulate_frame(const Phantom& phantom, const ArrayGeometry& geometry, double angle,
                              const PulseModel& pulse, std::size_t n_samples) {
  geometry.validate();
  pulse.validate();
  if (!(std::abs(angle) < std::numbers::pi / 2)) {
    throw ValidationError("steering angle must satisfy |angle| < pi/2");
  }
  const auto targets = expand_targets(phantom, geometry, angle);
  const double half = pulse.half_duration();
  const double fs = geometry.sampling_frequency;
  const double needed_t = latest_arrival(targets, geometry, angle) + half;
  const auto needed = static_cast<std::size_t>(std::ceil(needed_t * fs)) + 2;
  if (n_samples < needed) {
    throw ValidationError("sampled window too short for the deepest target: need n_samples >= " +
                          std::to_string(needed) + ", got " + std::to_string(n_samples));
  }

  const auto elements = static_cast<std::size_t>(geometry.element_count);
  PlaneWaveFrame frame{angle, Array2D<double>(n_samples, elements), 0.0};
  const double c = geometry.sound_speed;
  const double rate = envelope_rate(pulse);
  const double omega = 2.0 * std::numbers::pi * pulse.center_frequency;

  std::vector<double> element_x(elements);
  for (std::size_t k = 0; k < elements; ++k) element_x[k] = geometry.element_x(static_cast<int>(k));

  // Per-sample exp/cos replaced by recurrences: the Gaussian ratio between
  // neighbouring samples is itself geometric, and the carrier is a rotation.
  const double dt = 1.0 / fs;
  const double ratio_step = std::exp(-2.0 * rate * dt * dt);
  const double rot_c = std::cos(omega * dt);
  const double rot_s = std::sin(omega * dt);

  // Element-major accumulation keeps the inner loop contiguous.
  std::vector<double> traces(elements * n_samples, 0.0);
  for (const auto& target : targets) {
    if (target.amplitude == 0.0) continue;
    const double tx = transmit_delay(target.position, angle, c);
    for (std::size_t k = 0; k < elements; ++k) {
      const double arrival = tx + receive_delay(target.position, element_x[k], c);
      const double lo = std::ceil((arrival - half - frame.t0) * fs);
      const double hi = std::floor((arrival + half - frame.t0) * fs);
      const auto n_lo = static_cast<std::ptrdiff_t>(std::max(lo, 0.0));
      const auto n_hi = std::min(static_cast<std::ptrdiff_t>(hi),
                                 static_cast<std::ptrdiff_t>(n_samples) - 1);
      if (n_hi < n_lo) continue;
      const double tau0 = frame.t0 + static_cast<double>(n_lo) / fs - arrival;
      double gauss = target.amplitude * std::exp(-rate * tau0 * tau0);
      double ratio = std::exp(-rate * (2.0 * tau0 * dt + dt * dt));
      double cs = std::cos(omega * tau0);
      double sn = std::sin(omega * tau0);
      double* out = traces.data() + k * n_samples;
      for (std::ptrdiff_t n = n_lo; n <= n_hi; ++n) {
        out[n] += gauss * cs;
        gauss *= ratio;
        ratio *= ratio_step;
        const double next_cs = cs * rot_c - sn * rot_s;
        sn = sn * rot_c + cs * rot_s;
        cs = next_cs;
      }
    }
  }
  for (std::size_t n = 0; n < n_samples; ++n) {
    for (std::size_t k = 0; k < elements; ++k) frame.samples(n, k) = traces[k * n_samples + n];
  }
  return frame;
}

RfSweep simulate_sweep(const Phantom& phantom, const ArrayGeometry& geometry,
                       std::span<const double> angles, const PulseModel& pulse,
                       std::size_t n_samples, unsigned threads) {
  if (angles.empty()) throw ValidationError("sweep needs at least one angle");
  std::vector<PlaneWaveFrame> frames(angles.size());
  parallel_for(angles.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      frames[i] = simulate_frame(phantom, geometry, angles[i], pulse, n_samples);
    }
  });
  return RfSweep(geometry, std::move(frames));
}

PlaneWaveFrame add_noise(const PlaneWaveFrame& frame, double snr_db, std::uint64_t seed) {
  if (frame.samples.empty()) throw ValidationError("cannot add noise to an empty frame");
  if (!std::isfinite(snr_db)) throw ValidationError("snr_db must be finite");
  double power = 0.0;
  for (double v : frame.samples.values()) power += v * v;
  power /= static_cast<double>(frame.samples.size());
  const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));

  PlaneWaveFrame out = frame;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (double& v : out.samples.values()) v += sigma * noise(rng);
  return out;
}

std::vector<PointScatterer> speckle_region(double x_min, double x_max, double z_min, double z_max,
                                           double density_per_m2, double amplitude,
                                           std::uint64_t seed) {
  if (!(x_max > x_min) || !(z_max > z_min) || !(z_min > 0.0)) {
    throw ValidationError("speckle region bounds must be increasing with z > 0");
  }
  if (!(density_per_m2 >= 0.0)) throw ValidationError("speckle density must be >= 0");
  const auto count =
      static_cast<std::size_t>(std::llround(density_per_m2 * (x_max - x_min) * (z_max - z_min)));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(x_min, x_max);
  std::uniform_real_distribution<double> uz(z_min, z_max);
  std::normal_distribution<double> amp(0.0, amplitude);
  std::vector<PointScatterer> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = ux(rng);
    const double z = uz(rng);
    out.push_back({{x, z}, amp(rng)});
  }
  return out;
}

Phantom make_bone_phantom(std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  const double depth = 18e-3 + 2e-3 * jitter(rng);
  // Surface slopes stay within the steering span so the whole surface echoes back.
  const double curvature = 1.0e-3 + 0.4e-3 * jitter(rng);
  const double tilt = 0.03 * jitter(rng);

  SpecularSurface bone;
  bone.reflectivity = 1.0;
  bone.angular_falloff = 10.0 * std::numbers::pi / 180.0;
  const double half_width = 9e-3;
  for (int i = 0; i <= 24; ++i) {
    const double x = -half_width + i * (2.0 * half_width / 24);
    const double u = x / half_width;
    bone.polyline.push_back({x, depth + curvature * u * u + tilt * x});
  }
  auto surface_depth = [&](double x) {
    const double u = std::clamp(x / half_width, -1.0, 1.0);
    return depth + curvature * u * u + tilt * x;
  };

  auto tissue = speckle_region(-13e-3, 13e-3, 7e-3, 29e-3, 2e7, 0.15, seed);
  for (auto& s : tissue) {
    // Acoustic shadow: little energy reaches tissue beneath the bone.
    if (std::abs(s.position.x) <= half_width && s.position.z > surface_depth(s.position.x)) {
      s.reflectivity *= 0.05;
    }
  }
  return Phantom(std::move(tissue), {std::move(bone)});
}

}  // namespace usbeam
