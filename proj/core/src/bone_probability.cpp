#include "usbeam/bone_probability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "usbeam/error.hpp"
#include "usbeam/fft.hpp"

namespace usbeam {
namespace {

constexpr double kEnergyFloor = 1e-12;

void require_nonempty(const Image& image, const char* what) {
  if (image.empty()) throw ValidationError(std::string(what) + ": empty image");
}

// Replicate-boundary accessor.
double at(const Image& img, std::ptrdiff_t r, std::ptrdiff_t c) {
  const auto rows = static_cast<std::ptrdiff_t>(img.rows());
  const auto cols = static_cast<std::ptrdiff_t>(img.cols());
  r = std::clamp<std::ptrdiff_t>(r, 0, rows - 1);
  c = std::clamp<std::ptrdiff_t>(c, 0, cols - 1);
  return img(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
}

// Half-sample mirror extension to twice the size in each direction, so the
// periodic transform sees no wrap-around edges. Symmetry survives the even
// log-Gabor gain (and turns odd under the Riesz multiplier), so each quadrant
// of a filtered result carries exactly a quarter of its energy.
std::size_t fold(std::size_t i, std::size_t n) { return i < n ? i : 2 * n - 1 - i; }

std::vector<Complex> mirror_extend(const Image& image) {
  const std::size_t rows = image.rows();
  const std::size_t cols = image.cols();
  std::vector<Complex> out(4 * rows * cols);
  for (std::size_t r = 0; r < 2 * rows; ++r) {
    for (std::size_t c = 0; c < 2 * cols; ++c) {
      out[r * 2 * cols + c] = image(fold(r, rows), fold(c, cols));
    }
  }
  return out;
}

// Spectrum of the mirror-extended image, multiplied by the scale's log-Gabor gain.
// `fft` is sized 2 rows x 2 cols.
std::vector<Complex> band_spectrum(const Image& image, const FilterBankConfig& config,
                                   std::size_t scale_index, const Fft& fft) {
  config.validate();
  if (scale_index >= config.wavelengths.size()) {
    throw ValidationError("scale index " + std::to_string(scale_index) + " out of range");
  }
  const std::size_t rows = image.rows();
  const std::size_t cols = image.cols();
  if (rows < 8 || cols < 8) throw ValidationError("log-Gabor filtering needs at least 8x8 pixels");
  const double wavelength = config.wavelengths[scale_index];
  if (wavelength > static_cast<double>(std::min(rows, cols))) {
    throw ValidationError("wavelength " + std::to_string(wavelength) +
                          " px exceeds the image size");
  }
  const double omega0 = 2.0 * std::numbers::pi / wavelength;

  std::vector<Complex> spectrum = mirror_extend(image);
  fft.forward(spectrum);
  for (std::size_t r = 0; r < 2 * rows; ++r) {
    const double fy = fft_frequency(r, 2 * rows);
    for (std::size_t c = 0; c < 2 * cols; ++c) {
      const double fx = fft_frequency(c, 2 * cols);
      const double omega = 2.0 * std::numbers::pi * std::hypot(fx, fy);
      spectrum[r * 2 * cols + c] *= log_gabor_gain(omega, omega0, config.sigma_on_f);
    }
  }
  return spectrum;
}

double max_abs(const Image& img) {
  double m = 0.0;
  for (double v : img.values()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

void FilterBankConfig::validate() const {
  if (wavelengths.empty()) throw ValidationError("filter bank needs at least one scale");
  for (std::size_t i = 0; i < wavelengths.size(); ++i) {
    if (!(wavelengths[i] >= 2.0) || !std::isfinite(wavelengths[i])) {
      throw ValidationError("filter wavelengths must be >= 2 pixels");
    }
    if (i > 0 && !(wavelengths[i] > wavelengths[i - 1])) {
      throw ValidationError("filter wavelengths must be strictly increasing");
    }
  }
  if (!(sigma_on_f > 0.0 && sigma_on_f < 1.0)) {
    throw ValidationError("sigma_on_f must be in (0, 1)");
  }
}

void BpmConfig::validate() const {
  bank.validate();
  if (!(tau_fraction >= 0.0) || !std::isfinite(tau_fraction)) {
    throw ValidationError("tau_fraction must be >= 0");
  }
  if (!(shadow_sigma > 0.0)) throw ValidationError("shadow_sigma must be > 0");
}

Image integrated_backscatter(const Image& image) {
  require_nonempty(image, "integrated_backscatter");
  Image out(image.rows(), image.cols());
  for (std::size_t c = 0; c < image.cols(); ++c) {
    double running = 0.0;
    for (std::size_t r = 0; r < image.rows(); ++r) {
      running += image(r, c) * image(r, c);
      out(r, c) = running;
    }
  }
  return out;
}

Image rescale_to_unit_max(Image image) {
  const double peak = max_abs(image);
  if (peak > 0.0) {
    for (double& v : image.values()) v /= peak;
  }
  return image;
}

Image shadow_map(const Image& image, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ValidationError("shadow sigma must be > 0");
  require_nonempty(image, "shadow_map");
  const auto window = static_cast<std::size_t>(std::floor(3.0 * sigma));
  std::vector<double> g(window + 1);
  for (std::size_t i = 0; i <= window; ++i) {
    const double d = static_cast<double>(i);
    g[i] = std::exp(-d * d / (2.0 * sigma * sigma));
  }
  Image out(image.rows(), image.cols());
  for (std::size_t r = 0; r < image.rows(); ++r) {
    const std::size_t reach = std::min(window, r);
    for (std::size_t c = 0; c < image.cols(); ++c) {
      double num = 0.0;
      double den = 0.0;
      for (std::size_t i = 0; i <= reach; ++i) {
        num += g[i] * image(r - i, c);
        den += g[i];
      }
      out(r, c) = num / den;
    }
  }
  return out;
}

double log_gabor_gain(double omega, double omega0, double sigma_on_f) {
  if (omega <= 0.0) return 0.0;
  const double num = std::log(omega / omega0);
  const double den = std::log(sigma_on_f);
  return std::exp(-(num * num) / (2.0 * den * den));
}

Image log_gabor_filter(const Image& image, const FilterBankConfig& config, std::size_t scale_index) {
  const Fft fft(2 * image.rows(), 2 * image.cols());
  auto spectrum = band_spectrum(image, config, scale_index, fft);
  fft.inverse(spectrum);
  Image out(image.rows(), image.cols());
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) = spectrum[r * 2 * out.cols() + c].real();
  }
  return out;
}

PhaseTensorField phase_tensor(const Image& band) {
  require_nonempty(band, "phase_tensor");
  const std::size_t rows = band.rows();
  const std::size_t cols = band.cols();
  Image laplacian(rows, cols);
  Image hxx(rows, cols), hyy(rows, cols), hxy(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const auto ri = static_cast<std::ptrdiff_t>(r);
      const auto ci = static_cast<std::ptrdiff_t>(c);
      const double centre = band(r, c);
      hxx(r, c) = at(band, ri, ci + 1) - 2.0 * centre + at(band, ri, ci - 1);
      hyy(r, c) = at(band, ri + 1, ci) - 2.0 * centre + at(band, ri - 1, ci);
      hxy(r, c) = 0.25 * (at(band, ri + 1, ci + 1) - at(band, ri + 1, ci - 1) -
                          at(band, ri - 1, ci + 1) + at(band, ri - 1, ci - 1));
      laplacian(r, c) = hxx(r, c) + hyy(r, c);
    }
  }

  PhaseTensorField out{Image(rows, cols), Image(rows, cols), Image(rows, cols)};
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const auto ri = static_cast<std::ptrdiff_t>(r);
      const auto ci = static_cast<std::ptrdiff_t>(c);
      // Even: H H^T for symmetric H = [a b; b d].
      const double a = hxx(r, c);
      const double b = hxy(r, c);
      const double d = hyy(r, c);
      const double e11 = a * a + b * b;
      const double e12 = b * (a + d);
      const double e22 = b * b + d * d;
      // H H^T is positive semi-definite and loses the feature polarity; the
      // Hessian trace restores it (negative on bright ridges).
      const double polarity = a + d < 0.0 ? -1.0 : 1.0;
      const double t_even = polarity * std::sqrt(e11 * e11 + 2.0 * e12 * e12 + e22 * e22);

      // Odd: -0.5 (g q^T + q g^T), g = gradient, q = gradient of the Laplacian.
      const double gx = 0.5 * (at(band, ri, ci + 1) - at(band, ri, ci - 1));
      const double gy = 0.5 * (at(band, ri + 1, ci) - at(band, ri - 1, ci));
      const double qx = 0.5 * (at(laplacian, ri, ci + 1) - at(laplacian, ri, ci - 1));
      const double qy = 0.5 * (at(laplacian, ri + 1, ci) - at(laplacian, ri - 1, ci));
      const double o11 = -gx * qx;
      const double o22 = -gy * qy;
      const double o12 = -0.5 * (gx * qy + gy * qx);
      const double t_odd = std::sqrt(o11 * o11 + 2.0 * o12 * o12 + o22 * o22);

      const double phase = std::atan2(t_odd, t_even);
      out.t_even(r, c) = t_even;
      out.t_odd(r, c) = t_odd;
      out.lpt(r, c) = std::sqrt(t_even * t_even + t_odd * t_odd) * std::cos(phase);
    }
  }
  return out;
}

MonogenicField monogenic(const Image& lpt, const FilterBankConfig& config, std::size_t scale_index) {
  const std::size_t rows = lpt.rows();
  const std::size_t cols = lpt.cols();
  const Fft fft(2 * rows, 2 * cols);
  auto band = band_spectrum(lpt, config, scale_index, fft);

  std::vector<Complex> riesz(band.size());
  for (std::size_t r = 0; r < 2 * rows; ++r) {
    const double fy = fft_frequency(r, 2 * rows);
    for (std::size_t c = 0; c < 2 * cols; ++c) {
      const double fx = fft_frequency(c, 2 * cols);
      const double radius = std::hypot(fx, fy);
      const std::size_t i = r * 2 * cols + c;
      riesz[i] = radius > 0.0 ? band[i] * Complex(fx / radius, fy / radius) : Complex(0.0, 0.0);
    }
  }
  fft.inverse(band);
  fft.inverse(riesz);

  MonogenicField out{Image(rows, cols), Image(rows, cols), Image(rows, cols)};
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t i = r * 2 * cols + c;
      out.m1(r, c) = band[i].real();
      out.m2(r, c) = riesz[i].real();
      out.m3(r, c) = riesz[i].imag();
    }
  }
  return out;
}

Image local_phase(const MonogenicField& field) {
  if (!field.m1.same_shape(field.m2) || !field.m1.same_shape(field.m3)) {
    throw ValidationError("monogenic components differ in shape");
  }
  Image out(field.m1.rows(), field.m1.cols());
  auto m1 = field.m1.values();
  auto m2 = field.m2.values();
  auto m3 = field.m3.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = 1.0 + std::atan2(std::hypot(m2[i], m3[i]), m1[i]);
  }
  return out;
}

Image feature_symmetry(const Image& t_even, const Image& t_odd, const MonogenicField& field,
                       double tau, SymmetryNorm norm) {
  if (!(tau >= 0.0)) throw ValidationError("tau must be >= 0");
  if (!t_even.same_shape(t_odd) || !t_even.same_shape(field.m1) ||
      !t_even.same_shape(field.m2) || !t_even.same_shape(field.m3)) {
    throw ValidationError("feature_symmetry inputs differ in shape");
  }
  Image out(t_even.rows(), t_even.cols());
  auto te = t_even.values();
  auto to = t_odd.values();
  auto m1 = field.m1.values();
  auto m2 = field.m2.values();
  auto m3 = field.m3.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double numerator = std::max(std::abs(te[i]) - std::abs(to[i]) - tau, 0.0);
    const double energy = m1[i] * m1[i] + m2[i] * m2[i] + m3[i] * m3[i];
    const double denominator = norm == SymmetryNorm::energy ? energy : std::sqrt(energy);
    dst[i] = numerator / (denominator + kEnergyFloor);
  }
  out = rescale_to_unit_max(std::move(out));
  for (double& v : out.values()) v = std::clamp(v, 0.0, 1.0);
  return out;
}

BoneProbabilityMap bone_probability_map(const Image& image, const BpmConfig& config) {
  config.validate();
  require_nonempty(image, "bone_probability_map");
  for (double v : image.values()) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw ValidationError("bone_probability_map expects a normalized image in [0, 1]");
    }
  }
  const std::size_t rows = image.rows();
  const std::size_t cols = image.cols();
  const Image ibs = rescale_to_unit_max(integrated_backscatter(image));

  Image phase_symmetry(rows, cols);
  const std::size_t scales = config.bank.wavelengths.size();
  for (std::size_t s = 0; s < scales; ++s) {
    const Image band = log_gabor_filter(image, config.bank, s);
    const PhaseTensorField tensors = phase_tensor(band);
    const MonogenicField field = monogenic(tensors.lpt, config.bank, s);
    const Image lp = local_phase(field);
    const double tau =
        config.tau_fraction * std::max(max_abs(tensors.t_even), max_abs(tensors.t_odd));
    const Image fs = feature_symmetry(tensors.t_even, tensors.t_odd, field, tau, config.symmetry_norm);
    auto acc = phase_symmetry.values();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += lp.values()[i] * fs.values()[i];
  }

  BoneProbabilityMap map{Image(rows, cols)};
  auto dst = map.values.values();
  const auto ps = phase_symmetry.values();
  const auto ib = ibs.values();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = ps[i] / static_cast<double>(scales) * (1.0 - ib[i]);
  }
  const auto [lo, hi] = std::minmax_element(dst.begin(), dst.end());
  const double min = *lo;
  const double range = *hi - min;
  if (!(range > 0.0)) {
    std::fill(dst.begin(), dst.end(), 0.0);
    return map;
  }
  for (double& v : dst) v = (v - min) / range;
  return map;
}

}  // namespace usbeam
