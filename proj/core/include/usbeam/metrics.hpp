#ifndef USBEAM_METRICS_HPP
#define USBEAM_METRICS_HPP

#include <optional>
#include <string>

#include "usbeam/array2d.hpp"

namespace usbeam {

/// Bone foreground and the adjacent background band; disjoint, same shape.
struct RoiMask {
  Mask foreground;
  Mask background;
};

struct MetricsConfig {
  int ssi_bins = 256;
  int dilation_radius = 10;  ///< pixels
  double c1 = 0.01;
  double c2 = 0.01;

  void validate() const;
};

struct MetricsReport {
  double cr_db = 0.0;
  double snr_db = 0.0;
  std::optional<double> ssi;
  std::optional<double> ssim;
  std::optional<double> epi_percent;
};

/// Background = dilate(foreground, disk(radius)) minus foreground.
RoiMask make_background(const Mask& foreground, int dilation_radius);

double contrast_ratio(const Image& image, const RoiMask& roi);
double snr(const Image& image, const RoiMask& roi);
/// Histogram intersection of normalized histograms over [0, 1].
double ssi(const Image& ground_truth, const Image& predicted, int n_bins = 256);
/// Single-window SSIM over the whole image.
double ssim(const Image& ground_truth, const Image& predicted, double c1 = 0.01, double c2 = 0.01);
/// Normalized cross-correlation (x100) of mean-centred 3x3 Laplacian responses.
double epi(const Image& ground_truth, const Image& predicted);

/// 3x3 Laplacian [[0,1,0],[1,-4,1],[0,1,0]] with replicate boundary.
Image laplacian_highpass(const Image& image);

/// CR and SNR always; similarity metrics only when a reference is given.
MetricsReport evaluate(const Image& image, const Image* reference, const RoiMask& roi,
                       const MetricsConfig& config = {});

/// `key value` lines, one metric per line; absent metrics are omitted.
std::string format_report(const MetricsReport& report, const std::string& prefix = "");

}  // namespace usbeam

#endif  // USBEAM_METRICS_HPP
