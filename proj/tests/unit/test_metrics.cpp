#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "usbeam/error.hpp"
#include "usbeam/metrics.hpp"

using namespace usbeam;

namespace {

Mask block(std::size_t rows, std::size_t cols, std::size_t r0, std::size_t c0, std::size_t n) {
  Mask m(rows, cols, 0);
  for (std::size_t r = r0; r < r0 + n; ++r) {
    for (std::size_t c = c0; c < c0 + n; ++c) m(r, c) = 1;
  }
  return m;
}

// Image equal to `inside` on the foreground and `outside` elsewhere.
Image two_level(const RoiMask& roi, double inside, double outside) {
  Image im(roi.foreground.rows(), roi.foreground.cols(), outside);
  for (std::size_t i = 0; i < im.size(); ++i) {
    if (roi.foreground.values()[i]) im.values()[i] = inside;
  }
  return im;
}

std::size_t count(const Mask& m) {
  std::size_t n = 0;
  for (auto v : m.values()) n += v != 0;
  return n;
}

Image random_image(std::size_t rows, std::size_t cols, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  Image im(rows, cols);
  for (double& v : im.values()) v = u(rng);
  return im;
}

}  // namespace

TEST(Background, SinglePixelUnitDisk) {
  const RoiMask roi = make_background(block(5, 5, 2, 2, 1), 1);
  EXPECT_EQ(count(roi.background), 4u);
  EXPECT_EQ(roi.background(1, 2), 1);
  EXPECT_EQ(roi.background(1, 1), 0);
}

TEST(Background, BlockRingAndDisjointness) {
  const RoiMask roi = make_background(block(9, 9, 3, 3, 3), 1);
  EXPECT_EQ(count(roi.background), 12u);
  const RoiMask wide = make_background(block(40, 40, 15, 15, 5), 10);
  for (std::size_t i = 0; i < wide.foreground.size(); ++i) {
    EXPECT_FALSE(wide.foreground.values()[i] && wide.background.values()[i]);
  }
  // Pixel (2, 17) is 13 rows above the block: outside the radius-10 disk.
  EXPECT_EQ(wide.background(2, 17), 0);
  EXPECT_EQ(wide.background(5, 17), 1);
}

TEST(Background, Errors) {
  EXPECT_THROW(make_background(Mask(4, 4, 1), 1), ValidationError);
  EXPECT_THROW(make_background(Mask(4, 4, 0), 1), ValidationError);
  EXPECT_THROW(make_background(block(4, 4, 1, 1, 1), 0), ValidationError);
}

TEST(ContrastRatio, ReferenceValues) {
  const RoiMask roi = make_background(block(20, 20, 8, 8, 4), 3);
  EXPECT_DOUBLE_EQ(contrast_ratio(two_level(roi, 0.5, 0.5), roi), 0.0);
  EXPECT_NEAR(contrast_ratio(two_level(roi, 1.0, 0.1), roi), 20.0, 1e-12);
  EXPECT_NEAR(contrast_ratio(two_level(roi, 0.8, 0.4), roi), 6.0205999132796239, 1e-12);
  EXPECT_THROW(contrast_ratio(two_level(roi, 1.0, 0.0), roi), ValidationError);
  EXPECT_THROW(contrast_ratio(Image(3, 3), roi), ValidationError);
}

TEST(Snr, ReferenceValues) {
  const RoiMask roi = make_background(block(20, 20, 8, 8, 4), 3);
  EXPECT_DOUBLE_EQ(snr(two_level(roi, 0.5, 0.5), roi), 0.0);
  EXPECT_NEAR(snr(two_level(roi, 1.0, 0.1), roi), 20.0, 1e-12);
  EXPECT_NEAR(snr(two_level(roi, std::sqrt(2.0), 1.0), roi), 3.0102999566398121, 1e-12);

  // Foreground at 1 with no spread; background 0 and 1, so mean 0.5 and sigma 0.5.
  RoiMask hand{Mask(1, 4, 0), Mask(1, 4, 0)};
  hand.foreground(0, 0) = hand.foreground(0, 1) = 1;
  hand.background(0, 2) = hand.background(0, 3) = 1;
  Image im(1, 4, 1.0);
  im(0, 2) = 0.0;
  EXPECT_NEAR(snr(im, hand), 3.0102999566398121, 1e-9);
  EXPECT_THROW(snr(Image(1, 4, 0.0), hand), ValidationError);
}

TEST(RoiMetrics, ScaleInvariance) {
  const RoiMask roi = make_background(block(30, 30, 10, 12, 6), 5);
  const Image im = random_image(30, 30, 8);
  Image scaled = im;
  for (double& v : scaled.values()) v *= 3.7;
  EXPECT_NEAR(contrast_ratio(scaled, roi), contrast_ratio(im, roi), 1e-12);
  EXPECT_NEAR(snr(scaled, roi), snr(im, roi), 1e-12);
}

TEST(Ssi, ReferenceValues) {
  const Image a = random_image(16, 16, 1);
  EXPECT_DOUBLE_EQ(ssi(a, a), 1.0);
  EXPECT_EQ(ssi(Image(4, 4, 0.1), Image(4, 4, 0.9)), 0.0);
  // Three quarters of the pixels land in the same bin.
  Image b(4, 4, 0.1);
  for (std::size_t c = 0; c < 4; ++c) b(0, c) = 0.9;
  EXPECT_DOUBLE_EQ(ssi(Image(4, 4, 0.1), b), 0.75);
  // Two bins: [0.5, 0.5] against [0.25, 0.75].
  Image gt(1, 4, 0.2), pred(1, 4, 0.8);
  gt(0, 2) = gt(0, 3) = 0.8;
  pred(0, 0) = 0.2;
  EXPECT_NEAR(ssi(gt, pred, 2), 0.75, 1e-9);
  EXPECT_DOUBLE_EQ(ssi(gt, pred, 2), ssi(pred, gt, 2));
  // Histograms ignore pixel order and need not share a shape.
  EXPECT_DOUBLE_EQ(ssi(Image(4, 4, 0.1), Image(2, 8, 0.1)), 1.0);
  EXPECT_THROW(ssi(a, a, 1), ValidationError);
}

TEST(Ssim, ReferenceValues) {
  const Image a = random_image(20, 20, 2);
  EXPECT_NEAR(ssim(a, a), 1.0, 1e-15);
  EXPECT_NEAR(ssim(Image(5, 5, 0.0), Image(5, 5, 1.0)), 0.01 / 1.01, 1e-15);
  Image b = a;
  for (double& v : b.values()) v += 1e-6;
  EXPECT_GE(ssim(a, b), 0.9999);
  EXPECT_LT(ssim(a, b), 1.0);
  EXPECT_DOUBLE_EQ(ssim(a, b), ssim(b, a));
  EXPECT_THROW(ssim(a, Image(20, 21)), ValidationError);
}

TEST(Epi, ReferenceValues) {
  const Image a = random_image(24, 24, 3);
  EXPECT_NEAR(epi(a, a), 100.0, 1e-10);
  Image neg = a;
  for (double& v : neg.values()) v = 1.0 - v;
  EXPECT_NEAR(epi(a, neg), -100.0, 1e-10);
  Image affine = a;
  for (double& v : affine.values()) v = 0.4 * v + 0.2;
  EXPECT_NEAR(epi(a, affine), 100.0, 1e-10);

  Image blurred(24, 24);
  for (std::size_t r = 0; r < 24; ++r) {
    for (std::size_t c = 0; c < 24; ++c) {
      double s = 0.0;
      int n = 0;
      for (int dr = -2; dr <= 2; ++dr) {
        for (int dc = -2; dc <= 2; ++dc) {
          const auto rr = static_cast<std::ptrdiff_t>(r) + dr;
          const auto cc = static_cast<std::ptrdiff_t>(c) + dc;
          if (rr < 0 || cc < 0 || rr >= 24 || cc >= 24) continue;
          s += a(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
          ++n;
        }
      }
      blurred(r, c) = s / n;
    }
  }
  EXPECT_LT(epi(a, blurred), 100.0);
  Image shifted = a;
  for (double& v : shifted.values()) v += 0.3;
  EXPECT_NEAR(epi(a, shifted), 100.0, 1e-10);
  EXPECT_EQ(epi(a, Image(24, 24, 0.5)), 0.0);
  EXPECT_THROW(epi(Image(2, 2), Image(2, 2)), ValidationError);
}

TEST(Laplacian, KernelResponse) {
  Image im(5, 5);
  im(2, 2) = 1.0;
  const Image h = laplacian_highpass(im);
  EXPECT_EQ(h(2, 2), -4.0);
  EXPECT_EQ(h(1, 2), 1.0);
  EXPECT_EQ(h(1, 1), 0.0);
  const auto result = laplacian_highpass(Image(4, 4, 0.3));
  for (double v : result.values()) EXPECT_EQ(v, 0.0);
}

TEST(Evaluate, OptionalMetricsFollowReference) {
  const RoiMask roi = make_background(block(20, 20, 8, 8, 4), 3);
  const Image im = random_image(20, 20, 4);
  const MetricsReport alone = evaluate(im, nullptr, roi);
  EXPECT_FALSE(alone.ssi || alone.ssim || alone.epi_percent);
  EXPECT_DOUBLE_EQ(alone.cr_db, contrast_ratio(im, roi));
  const MetricsReport paired = evaluate(im, &im, roi);
  EXPECT_DOUBLE_EQ(*paired.ssi, 1.0);
  EXPECT_NEAR(*paired.ssim, 1.0, 1e-15);
  const std::string text = format_report(paired, "beam_");
  EXPECT_NE(text.find("beam_cr_db "), std::string::npos);
  EXPECT_NE(text.find("beam_ssim 1\n"), std::string::npos);
  EXPECT_EQ(format_report(alone).find("ssim"), std::string::npos);
  EXPECT_THROW(evaluate(im, nullptr, roi, {1, 10, 0.01, 0.01}), ValidationError);
}
