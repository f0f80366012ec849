#include "usbeam/enhancement.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "usbeam/error.hpp"

namespace usbeam {

void AttentionWeights::validate() const {
  if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma)) {
    throw ValidationError("attention weights must be finite");
  }
  if (alpha < 0.0 || beta < 0.0) throw ValidationError("alpha and beta must be >= 0");
}

OtsuResult otsu_threshold(const Image& map, int bins) {
  if (bins < 2) throw ValidationError("otsu needs at least 2 bins");
  OtsuResult result{0.0, Mask(map.rows(), map.cols(), 0)};
  if (map.empty()) return result;
  const auto values = map.values();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (!(*hi > *lo)) return result;

  const auto n_bins = static_cast<std::size_t>(bins);
  std::vector<double> hist(n_bins, 0.0);
  for (double v : values) {
    const double u = std::clamp(v, 0.0, 1.0);
    const auto b = std::min(static_cast<std::size_t>(u * bins), n_bins - 1);
    hist[b] += 1.0;
  }
  const double total = static_cast<double>(values.size());
  double sum_all = 0.0;
  for (std::size_t b = 0; b < n_bins; ++b) sum_all += static_cast<double>(b) * hist[b];

  // Class 0 = bins [0, k], class 1 = bins (k, end).
  std::vector<double> variance(n_bins - 1, 0.0);
  double w0 = 0.0;
  double sum0 = 0.0;
  for (std::size_t k = 0; k + 1 < n_bins; ++k) {
    w0 += hist[k];
    sum0 += static_cast<double>(k) * hist[k];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double mu0 = sum0 / w0;
    const double mu1 = (sum_all - sum0) / w1;
    variance[k] = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
  }
  const auto best = std::max_element(variance.begin(), variance.end());
  const auto first = static_cast<std::size_t>(best - variance.begin());
  std::size_t last = first;
  while (last + 1 < variance.size() && variance[last + 1] == *best) ++last;
  const std::size_t k = (first + last) / 2;

  result.threshold = static_cast<double>(k + 1) / bins;
  for (std::size_t i = 0; i < values.size(); ++i) {
    result.mask.values()[i] = values[i] >= result.threshold ? 1 : 0;
  }
  return result;
}

Image EnhancedImage::clamped() const {
  Image out = values;
  for (double& v : out.values()) v = std::clamp(v, 0.0, 1.0);
  return out;
}

EnhancedImage beam_enhance(const Image& image, const BoneProbabilityMap& map,
                           const AttentionWeights& weights) {
  weights.validate();
  if (!image.same_shape(map.values)) {
    throw ValidationError("beam_enhance: image and bone map differ in shape");
  }
  const OtsuResult gate = otsu_threshold(map.values);
  EnhancedImage out{Image(image.rows(), image.cols()), weights};
  const auto src = image.values();
  const auto bpm = map.values.values();
  const auto mask = gate.mask.values();
  auto dst = out.values.values();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double gated = mask[i] ? bpm[i] : 0.0;
    dst[i] = weights.alpha * src[i] + weights.beta * gated + weights.gamma;
  }
  return out;
}

}  // namespace usbeam
