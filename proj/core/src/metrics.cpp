#include "usbeam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "usbeam/error.hpp"

namespace usbeam {
namespace {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

Moments region_moments(const Image& image, const Mask& mask, const char* which) {
  double sum = 0.0;
  std::size_t n = 0;
  const auto v = image.values();
  const auto m = mask.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (m[i]) {
      sum += v[i];
      ++n;
    }
  }
  if (n == 0) throw ValidationError(std::string(which) + " region is empty");
  Moments out;
  out.mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (m[i]) ss += (v[i] - out.mean) * (v[i] - out.mean);
  }
  out.variance = ss / static_cast<double>(n);
  return out;
}

void check_roi(const Image& image, const RoiMask& roi) {
  if (!image.same_shape(roi.foreground) || !image.same_shape(roi.background)) {
    throw ValidationError("ROI masks do not match the image shape");
  }
}

void check_pair(const Image& a, const Image& b, const char* what) {
  if (a.empty() || b.empty()) throw ValidationError(std::string(what) + ": empty image");
  if (!a.same_shape(b)) throw ValidationError(std::string(what) + ": image shapes differ");
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

void MetricsConfig::validate() const {
  if (ssi_bins < 2) throw ValidationError("ssi_bins must be >= 2");
  if (dilation_radius < 1) throw ValidationError("dilation_radius must be >= 1");
  if (!(c1 >= 0.0) || !(c2 >= 0.0)) throw ValidationError("SSIM constants must be >= 0");
}

RoiMask make_background(const Mask& foreground, int dilation_radius) {
  if (dilation_radius < 1) throw ValidationError("dilation radius must be >= 1");
  const auto fg = foreground.values();
  if (std::none_of(fg.begin(), fg.end(), [](std::uint8_t v) { return v != 0; })) {
    throw ValidationError("foreground mask is empty");
  }
  const auto rows = static_cast<std::ptrdiff_t>(foreground.rows());
  const auto cols = static_cast<std::ptrdiff_t>(foreground.cols());
  const std::ptrdiff_t r2 = static_cast<std::ptrdiff_t>(dilation_radius) * dilation_radius;

  std::vector<std::pair<std::ptrdiff_t, std::ptrdiff_t>> disk;
  for (std::ptrdiff_t dy = -dilation_radius; dy <= dilation_radius; ++dy) {
    for (std::ptrdiff_t dx = -dilation_radius; dx <= dilation_radius; ++dx) {
      if (dy * dy + dx * dx <= r2) disk.emplace_back(dy, dx);
    }
  }

  RoiMask roi{foreground, Mask(foreground.rows(), foreground.cols(), 0)};
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    for (std::ptrdiff_t c = 0; c < cols; ++c) {
      if (!foreground(static_cast<std::size_t>(r), static_cast<std::size_t>(c))) continue;
      for (const auto& [dy, dx] : disk) {
        const std::ptrdiff_t y = r + dy;
        const std::ptrdiff_t x = c + dx;
        if (y < 0 || y >= rows || x < 0 || x >= cols) continue;
        const auto yu = static_cast<std::size_t>(y);
        const auto xu = static_cast<std::size_t>(x);
        if (!foreground(yu, xu)) roi.background(yu, xu) = 1;
      }
    }
  }
  const auto bg = roi.background.values();
  if (std::none_of(bg.begin(), bg.end(), [](std::uint8_t v) { return v != 0; })) {
    throw ValidationError("dilation left no background pixels");
  }
  return roi;
}

double contrast_ratio(const Image& image, const RoiMask& roi) {
  check_roi(image, roi);
  const Moments in = region_moments(image, roi.foreground, "foreground");
  const Moments out = region_moments(image, roi.background, "background");
  if (!(out.mean > 0.0)) throw ValidationError("contrast ratio undefined: background mean is 0");
  return 20.0 * std::log10(in.mean / out.mean);
}

double snr(const Image& image, const RoiMask& roi) {
  check_roi(image, roi);
  const Moments in = region_moments(image, roi.foreground, "foreground");
  const Moments out = region_moments(image, roi.background, "background");
  const double denominator = out.mean * out.mean + out.variance;
  if (!(denominator > 0.0)) throw ValidationError("SNR undefined: background energy is 0");
  return 10.0 * std::log10((in.mean * in.mean + in.variance) / denominator);
}

double ssi(const Image& ground_truth, const Image& predicted, int n_bins) {
  if (n_bins < 2) throw ValidationError("ssi needs at least 2 bins");
  if (ground_truth.empty() || predicted.empty()) throw ValidationError("ssi: empty image");
  const auto bins = static_cast<std::size_t>(n_bins);
  auto histogram = [&](const Image& img) {
    std::vector<double> h(bins, 0.0);
    for (double v : img.values()) {
      const double u = std::clamp(v, 0.0, 1.0);
      h[std::min(static_cast<std::size_t>(u * n_bins), bins - 1)] += 1.0;
    }
    return h;
  };
  // Integer counts cross-multiplied by the other image's size: every term is exact,
  // so identical histograms give exactly 1.
  const auto hg = histogram(ground_truth);
  const auto hp = histogram(predicted);
  const auto ng = static_cast<double>(ground_truth.size());
  const auto np = static_cast<double>(predicted.size());
  double overlap = 0.0;
  for (std::size_t i = 0; i < bins; ++i) overlap += std::min(hg[i] * np, hp[i] * ng);
  const double total = overlap / (ng * np);
  return std::clamp(total, 0.0, 1.0);
}

double ssim(const Image& ground_truth, const Image& predicted, double c1, double c2) {
  check_pair(ground_truth, predicted, "ssim");
  const auto x = ground_truth.values();
  const auto y = predicted.values();
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double vx = 0.0, vy = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    vx += dx * dx;
    vy += dy * dy;
    cov += dx * dy;
  }
  const auto n = static_cast<double>(x.size());
  vx /= n;
  vy /= n;
  cov /= n;
  return ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
         ((mx * mx + my * my + c1) * (vx + vy + c2));
}

Image laplacian_highpass(const Image& image) {
  const auto rows = static_cast<std::ptrdiff_t>(image.rows());
  const auto cols = static_cast<std::ptrdiff_t>(image.cols());
  auto at = [&](std::ptrdiff_t r, std::ptrdiff_t c) {
    r = std::clamp<std::ptrdiff_t>(r, 0, rows - 1);
    c = std::clamp<std::ptrdiff_t>(c, 0, cols - 1);
    return image(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  };
  Image out(image.rows(), image.cols());
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    for (std::ptrdiff_t c = 0; c < cols; ++c) {
      out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) =
          at(r - 1, c) + at(r + 1, c) + at(r, c - 1) + at(r, c + 1) - 4.0 * at(r, c);
    }
  }
  return out;
}

double epi(const Image& ground_truth, const Image& predicted) {
  check_pair(ground_truth, predicted, "epi");
  if (ground_truth.rows() < 3 || ground_truth.cols() < 3) {
    throw ValidationError("epi needs images of at least 3x3");
  }
  const Image hg = laplacian_highpass(ground_truth);
  const Image hp = laplacian_highpass(predicted);
  const double mg = mean_of(hg.values());
  const double mp = mean_of(hp.values());
  double cross = 0.0, eg = 0.0, ep = 0.0;
  for (std::size_t i = 0; i < hg.size(); ++i) {
    const double dg = hg.values()[i] - mg;
    const double dp = hp.values()[i] - mp;
    cross += dg * dp;
    eg += dg * dg;
    ep += dp * dp;
  }
  if (eg == 0.0 || ep == 0.0) return 0.0;
  return cross / std::sqrt(eg * ep) * 100.0;
}

MetricsReport evaluate(const Image& image, const Image* reference, const RoiMask& roi,
                       const MetricsConfig& config) {
  config.validate();
  MetricsReport report;
  report.cr_db = contrast_ratio(image, roi);
  report.snr_db = snr(image, roi);
  if (reference != nullptr) {
    report.ssi = ssi(*reference, image, config.ssi_bins);
    report.ssim = ssim(*reference, image, config.c1, config.c2);
    report.epi_percent = epi(*reference, image);
  }
  return report;
}

std::string format_report(const MetricsReport& report, const std::string& prefix) {
  std::string out;
  auto line = [&](const char* key, double value) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    out += prefix + key + " " + buf + "\n";
  };
  line("cr_db", report.cr_db);
  line("snr_db", report.snr_db);
  if (report.ssi) line("ssi", *report.ssi);
  if (report.ssim) line("ssim", *report.ssim);
  if (report.epi_percent) line("epi_percent", *report.epi_percent);
  return out;
}

}  // namespace usbeam
