#ifndef USBEAM_BONE_PROBABILITY_HPP
#define USBEAM_BONE_PROBABILITY_HPP

#include <cstddef>
#include <vector>

#include "usbeam/array2d.hpp"

namespace usbeam {

/// Log-Gabor bank: one centre wavelength (pixels) per scale, shared sigma_on_f.
struct FilterBankConfig {
  std::vector<double> wavelengths{16.0, 32.0};
  double sigma_on_f = 0.55;

  void validate() const;
};

/// Denominator of the feature symmetry ratio: local energy m1^2 + m2^2 + m3^2, or its
/// square root (local amplitude), which keeps the ratio independent of image contrast.
enum class SymmetryNorm { energy, amplitude };

struct BpmConfig {
  FilterBankConfig bank;
  SymmetryNorm symmetry_norm = SymmetryNorm::amplitude;
  double tau_fraction = 0.01;  ///< noise floor as a fraction of the largest tensor magnitude
  double shadow_sigma = 5.0;   ///< pixels; only used by shadow_map

  void validate() const;
};

/// Even (m1) and odd (m2, m3) parts of the monogenic signal.
struct MonogenicField {
  Image m1;
  Image m2;
  Image m3;
};

/// Scalar reductions of the symmetric/asymmetric phase tensors and their combination.
struct PhaseTensorField {
  Image t_even;
  Image t_odd;
  Image lpt;
};

/// Per-pixel bone likelihood, min-max normalized to [0, 1].
struct BoneProbabilityMap {
  Image values;
};

/// Cumulative sum of squared intensity down each column (row 0 is the shallowest).
Image integrated_backscatter(const Image& image);

/// Divides by the global maximum; an all-zero image is returned unchanged.
Image rescale_to_unit_max(Image image);

/// Causal Gaussian-weighted mean of each pixel and the 3*sigma pixels above it.
Image shadow_map(const Image& image, double sigma);

/// Radial log-Gabor transfer function; omega and omega0 in rad/pixel. Zero at DC.
double log_gabor_gain(double omega, double omega0, double sigma_on_f);

/// Band-passes the image with scale `scale_index` of the bank (real part of the inverse FFT).
Image log_gabor_filter(const Image& image, const FilterBankConfig& config, std::size_t scale_index);

/// Hessian- and gradient/Laplacian-derived tensors reduced by Frobenius norm, plus the
/// local phase tensor sqrt(te^2 + to^2) * cos(atan2(to, te)).
/// t_even carries the sign of the Hessian trace, so bright ridges are negative.
PhaseTensorField phase_tensor(const Image& band);

/// Band-passes `lpt` at the given scale and applies the Riesz transform
/// (wx + i wy) / |w|; m2/m3 are the real/imaginary parts of its inverse FFT.
MonogenicField monogenic(const Image& lpt, const FilterBankConfig& config, std::size_t scale_index);

/// 1 + atan2(sqrt(m2^2 + m3^2), m1), in [1, 1 + pi].
Image local_phase(const MonogenicField& field);

/// max(|te| - |to| - tau, 0) / (m1^2 + m2^2 + m3^2 + 1e-12), rescaled by its maximum to [0, 1].
/// With SymmetryNorm::amplitude the denominator is sqrt(m1^2 + m2^2 + m3^2) + 1e-12.
Image feature_symmetry(const Image& t_even, const Image& t_odd, const MonogenicField& field,
                       double tau, SymmetryNorm norm = SymmetryNorm::energy);

/// Full map: scale-averaged LP * FS, weighted by (1 - rescaled IBS), min-max normalized.
/// A constant product yields an all-zero map.
BoneProbabilityMap bone_probability_map(const Image& image, const BpmConfig& config = {});

}  // namespace usbeam

#endif  // USBEAM_BONE_PROBABILITY_HPP
