#ifndef USBEAM_ENHANCEMENT_HPP
#define USBEAM_ENHANCEMENT_HPP

#include "usbeam/array2d.hpp"
#include "usbeam/bone_probability.hpp"

namespace usbeam {

/// Blend weights for image, gated bone map, and bias.
struct AttentionWeights {
  double alpha = 0.30;
  double beta = 0.09;
  double gamma = 0.50;

  void validate() const;
};

struct OtsuResult {
  double threshold = 0.0;
  Mask mask;  ///< 1 where map >= threshold
};

/// Otsu's threshold over a `bins`-bin histogram of [0, 1]. When several thresholds
/// tie for the largest between-class variance, the middle of that run is used.
/// A constant map yields threshold 0 and an empty mask.
OtsuResult otsu_threshold(const Image& map, int bins = 256);

struct EnhancedImage {
  Image values;  ///< unclamped blend
  AttentionWeights weights;

  /// Copy clamped to [0, 1] for display and export.
  Image clamped() const;
};

/// alpha * I + beta * (Otsu-gated map) + gamma.
EnhancedImage beam_enhance(const Image& image, const BoneProbabilityMap& map,
                           const AttentionWeights& weights = {});

}  // namespace usbeam

#endif  // USBEAM_ENHANCEMENT_HPP
