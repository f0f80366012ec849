#include "usbeam/beamformer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "usbeam/error.hpp"
#include "usbeam/fft.hpp"
#include "usbeam/parallel.hpp"

namespace usbeam {

namespace {

// Sums in ascending order so the result does not depend on the order of the terms.
double ordered_sum(std::span<double> terms) {
  std::sort(terms.begin(), terms.end());
  double total = 0.0;
  for (double t : terms) total += t;
  return total;
}

}  // namespace

void ApodizationSpec::validate() const {
  if (!(tukey_ratio >= 0.0 && tukey_ratio <= 1.0)) {
    throw ValidationError("tukey ratio must be in [0, 1]");
  }
  if (!(f_number >= 0.0) || !std::isfinite(f_number)) {
    throw ValidationError("f_number must be >= 0");
  }
}

std::vector<double> ApodizationSpec::element_weights(int element_count) const {
  validate();
  const auto n = static_cast<std::size_t>(element_count);
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  const double last = static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = static_cast<double>(k) / last;  // 0..1 across the array
    switch (window) {
      case Window::rectangular:
        break;
      case Window::hann:
        w[k] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * u);
        break;
      case Window::tukey: {
        const double r = tukey_ratio;
        if (r <= 0.0) break;
        if (u < r / 2) {
          w[k] = 0.5 * (1.0 + std::cos(std::numbers::pi * (2.0 * u / r - 1.0)));
        } else if (u > 1.0 - r / 2) {
          w[k] = 0.5 * (1.0 + std::cos(std::numbers::pi * (2.0 * u / r - 2.0 / r + 1.0)));
        }
        break;
      }
    }
  }
  return w;
}

DasBeamformer::DasBeamformer(ArrayGeometry geometry, ImagingGrid grid,
                             ApodizationSpec apodization, unsigned threads)
    : geometry_(geometry),
      grid_(std::move(grid)),
      apodization_(apodization),
      threads_(threads) {
  geometry_.validate();
  grid_.validate();
  weights_ = apodization_.element_weights(geometry_.element_count);
}

void DasBeamformer::check_frame(const PlaneWaveFrame& frame) const {
  if (frame.samples.cols() != static_cast<std::size_t>(geometry_.element_count)) {
    throw ValidationError("frame has " + std::to_string(frame.samples.cols()) +
                          " columns, geometry has " + std::to_string(geometry_.element_count) +
                          " elements");
  }
  if (frame.samples.rows() < 2) throw ValidationError("frame needs at least 2 samples");
  // The deepest row must be reachable by at least its nearest element.
  const double c = geometry_.sound_speed;
  const double t_end =
      frame.t0 + static_cast<double>(frame.samples.rows() - 1) / geometry_.sampling_frequency;
  const double z = grid_.axial.back();
  const double half_aperture = 0.5 * (geometry_.element_count - 1) * geometry_.pitch;
  for (double x : {grid_.lateral.front(), grid_.lateral.back()}) {
    const double nearest = std::clamp(x, -half_aperture, half_aperture);
    const double t = transmit_delay({x, z}, frame.steering_angle, c) + receive_delay({x, z}, nearest, c);
    if (t > t_end) {
      throw ValidationError("imaging grid extends beyond the sampled window (depth " +
                            std::to_string(z) + " m needs " + std::to_string(t) +
                            " s, frame ends at " + std::to_string(t_end) + " s)");
    }
  }
}

BeamformedImage DasBeamformer::run(std::span<const PlaneWaveFrame* const> frames) const {
  const std::size_t rows = grid_.rows();
  const std::size_t cols = grid_.cols();
  const auto elements = static_cast<std::size_t>(geometry_.element_count);
  const double c = geometry_.sound_speed;
  const double fs = geometry_.sampling_frequency;
  const double f_number = apodization_.f_number;

  std::vector<double> element_x(elements);
  for (std::size_t k = 0; k < elements; ++k) element_x[k] = geometry_.element_x(static_cast<int>(k));

  struct Steering {
    double sin_a, cos_a;
  };
  std::vector<Steering> steering;
  for (const auto* f : frames) steering.push_back({std::sin(f->steering_angle), std::cos(f->steering_angle)});

  BeamformedImage out{grid_, Image(rows, cols)};
  parallel_for(rows, threads_, [&](std::size_t row_begin, std::size_t row_end) {
    std::vector<double> rx(elements);
    std::vector<double> w(elements);
    std::vector<double> per_frame(frames.size());
    for (std::size_t r = row_begin; r < row_end; ++r) {
      const double z = grid_.axial[r];
      for (std::size_t col = 0; col < cols; ++col) {
        const double x = grid_.lateral[col];
        for (std::size_t k = 0; k < elements; ++k) {
          rx[k] = receive_delay({x, z}, element_x[k], c);
          const bool masked = f_number > 0.0 && std::abs(x - element_x[k]) * f_number > z / 2.0;
          w[k] = masked ? 0.0 : weights_[k];
        }
        for (std::size_t j = 0; j < frames.size(); ++j) {
          const PlaneWaveFrame& frame = *frames[j];
          const auto& s = frame.samples;
          const std::size_t n = s.rows();
          const double tx = (z * steering[j].cos_a + x * steering[j].sin_a) / c;
          double sum = 0.0;
          for (std::size_t k = 0; k < elements; ++k) {
            if (w[k] == 0.0) continue;
            const double pos = (tx + rx[k] - frame.t0) * fs;
            if (!(pos >= 0.0)) continue;
            const double base = std::floor(pos);
            const auto i0 = static_cast<std::size_t>(base);
            if (i0 + 1 >= n) continue;
            const double frac = pos - base;
            const double v = s(i0, k) + frac * (s(i0 + 1, k) - s(i0, k));
            sum += w[k] * v;
          }
          per_frame[j] = sum;
        }
        out.values(r, col) = ordered_sum(per_frame);
      }
    }
  });
  return out;
}

BeamformedImage DasBeamformer::beamform(const PlaneWaveFrame& frame) const {
  check_frame(frame);
  const PlaneWaveFrame* one[] = {&frame};
  return run(one);
}

BeamformedImage DasBeamformer::beamform_compound(const RfSweep& sweep) const {
  validate_sweep(sweep);
  std::vector<const PlaneWaveFrame*> frames;
  for (const auto& f : sweep.frames()) {
    check_frame(f);
    frames.push_back(&f);
  }
  return run(frames);
}

BeamformedImage das_beamform(const PlaneWaveFrame& frame, const ArrayGeometry& geometry,
                             const ImagingGrid& grid, const ApodizationSpec& apodization,
                             unsigned threads) {
  return DasBeamformer(geometry, grid, apodization, threads).beamform(frame);
}

BeamformedImage compound(std::span<const BeamformedImage> images) {
  if (images.empty()) throw ValidationError("compound needs at least one image");
  const BeamformedImage& first = images.front();
  for (std::size_t i = 1; i < images.size(); ++i) {
    const auto& img = images[i];
    if (img.grid.lateral != first.grid.lateral || img.grid.axial != first.grid.axial ||
        !img.values.same_shape(first.values)) {
      throw ValidationError("compound: image " + std::to_string(i) + " has a different grid");
    }
  }
  BeamformedImage out{first.grid, Image(first.values.rows(), first.values.cols())};
  std::vector<double> terms(images.size());
  auto dst = out.values.values();
  for (std::size_t p = 0; p < dst.size(); ++p) {
    for (std::size_t i = 0; i < images.size(); ++i) terms[i] = images[i].values.values()[p];
    dst[p] = ordered_sum(terms);
  }
  return out;
}

BeamformedImage envelope_detect(const BeamformedImage& image) {
  const std::size_t rows = image.values.rows();
  const std::size_t cols = image.values.cols();
  if (rows < 8) throw ValidationError("envelope detection needs at least 8 axial samples");
  BeamformedImage out{image.grid, Image(rows, cols)};
  const Fft fft(rows);
  std::vector<Complex> column(rows);
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r < rows; ++r) column[r] = image.values(r, c);
    fft.forward(column);
    // One-sided spectrum: keep DC and Nyquist, double positive bins, drop negative ones.
    const std::size_t half = rows / 2;
    for (std::size_t i = 1; i < rows; ++i) {
      if (i < (rows + 1) / 2) {
        column[i] *= 2.0;
      } else if (!(rows % 2 == 0 && i == half)) {
        column[i] = 0.0;
      }
    }
    fft.inverse(column);
    for (std::size_t r = 0; r < rows; ++r) out.values(r, c) = std::abs(column[r]);
  }
  return out;
}

BModeImage log_compress(const BeamformedImage& envelope, double dynamic_range) {
  if (!(dynamic_range > 0.0) || !std::isfinite(dynamic_range)) {
    throw ValidationError("dynamic_range must be > 0");
  }
  double peak = 0.0;
  for (double v : envelope.values.values()) {
    if (!std::isfinite(v)) throw ValidationError("envelope contains non-finite values");
    if (v < 0.0) throw ValidationError("envelope values must be >= 0");
    peak = std::max(peak, v);
  }
  BModeImage out{envelope.grid, Image(envelope.values.rows(), envelope.values.cols()), dynamic_range};
  if (peak == 0.0) return out;
  auto src = envelope.values.values();
  auto dst = out.values.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double db = src[i] > 0.0 ? 20.0 * std::log10(src[i] / peak) : -dynamic_range;
    dst[i] = std::clamp(db, -dynamic_range, 0.0) / dynamic_range + 1.0;
  }
  return out;
}

namespace {

// Distance from the peak to the half-maximum crossing along one direction,
// linearly interpolated between samples; stops at the grid edge.
double half_width(std::span<const double> profile, std::span<const double> coords, std::size_t peak,
                  int direction) {
  const double half = 0.5 * profile[peak];
  std::ptrdiff_t i = static_cast<std::ptrdiff_t>(peak);
  const auto n = static_cast<std::ptrdiff_t>(profile.size());
  while (true) {
    const std::ptrdiff_t next = i + direction;
    if (next < 0 || next >= n) return std::abs(coords[static_cast<std::size_t>(i)] - coords[peak]);
    const double a = profile[static_cast<std::size_t>(i)];
    const double b = profile[static_cast<std::size_t>(next)];
    if (b < half) {
      const double t = (a - half) / (a - b);
      const double xa = coords[static_cast<std::size_t>(i)];
      const double xb = coords[static_cast<std::size_t>(next)];
      return std::abs(xa + t * (xb - xa) - coords[peak]);
    }
    i = next;
  }
}

}  // namespace

PointResponse measure_point_response(const BeamformedImage& envelope) {
  const auto& v = envelope.values;
  if (v.empty()) throw ValidationError("empty envelope image");
  const auto values = v.values();
  const auto it = std::max_element(values.begin(), values.end());
  const auto index = static_cast<std::size_t>(it - values.begin());
  PointResponse pr;
  pr.peak_row = index / v.cols();
  pr.peak_col = index % v.cols();
  pr.peak = {envelope.grid.lateral[pr.peak_col], envelope.grid.axial[pr.peak_row]};

  const auto lateral = v.row(pr.peak_row);
  pr.lateral_fwhm = half_width(lateral, envelope.grid.lateral, pr.peak_col, -1) +
                    half_width(lateral, envelope.grid.lateral, pr.peak_col, +1);
  std::vector<double> axial(v.rows());
  for (std::size_t r = 0; r < v.rows(); ++r) axial[r] = v(r, pr.peak_col);
  pr.axial_fwhm = half_width(axial, envelope.grid.axial, pr.peak_row, -1) +
                  half_width(axial, envelope.grid.axial, pr.peak_row, +1);
  return pr;
}

}  // namespace usbeam
