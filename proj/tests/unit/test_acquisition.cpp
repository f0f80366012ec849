#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "usbeam/acquisition.hpp"
#include "usbeam/error.hpp"

using namespace usbeam;

namespace {

ArrayGeometry l11() { return make_linear_array(128, 0.3e-3, 7.6e6, 31.25e6, 1540.0); }

PlaneWaveFrame frame(double angle, std::size_t samples, std::size_t elements) {
  return {angle, Array2D<double>(samples, elements), 0.0};
}

}  // namespace

TEST(LinearArray, DerivedQuantities) {
  const ArrayGeometry g = l11();
  EXPECT_DOUBLE_EQ(g.aperture(), 0.0384);
  EXPECT_NEAR(g.wavelength(), 202.63157894736842e-6, 1e-15);
  // Elements are centred on x = 0.
  EXPECT_DOUBLE_EQ(g.element_x(0), -g.element_x(127));
  EXPECT_NEAR(g.element_x(64) - g.element_x(63), 0.3e-3, 1e-18);
}

TEST(LinearArray, MinimalArrayIsValid) {
  const ArrayGeometry g = make_linear_array(2, 1e-3, 1e6, 3e6, 1540.0);
  EXPECT_EQ(g.element_count, 2);
  EXPECT_DOUBLE_EQ(g.aperture(), 2e-3);
}

TEST(LinearArray, RejectsNyquistViolation) {
  try {
    make_linear_array(128, 0.3e-3, 7.6e6, 10e6, 1540.0);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("sampling_frequency"), std::string::npos);
  }
}

TEST(LinearArray, RejectsNonPositiveFields) {
  EXPECT_THROW(make_linear_array(1, 0.3e-3, 7.6e6, 31.25e6, 1540.0), ValidationError);
  EXPECT_THROW(make_linear_array(128, 0.0, 7.6e6, 31.25e6, 1540.0), ValidationError);
  EXPECT_THROW(make_linear_array(128, 0.3e-3, -1.0, 31.25e6, 1540.0), ValidationError);
  EXPECT_THROW(make_linear_array(128, 0.3e-3, 7.6e6, 31.25e6, 0.0), ValidationError);
}

TEST(SteeringAngles, FullSetSpansIndexRange) {
  const ArrayGeometry g = l11();
  const auto a = steering_angle_set(g, 128);
  ASSERT_EQ(a.size(), 128u);
  const double step = g.wavelength() / g.aperture();
  EXPECT_NEAR(a.front(), -64 * step, 1e-15);
  EXPECT_NEAR(a.back(), 63 * step, 1e-15);
  EXPECT_NEAR(a.back(), 0.33244243421052634, 1e-12);
}

TEST(SteeringAngles, SingleAngleIsZero) {
  const auto a = steering_angle_set(l11(), 1);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0], 0.0);
}

TEST(SteeringAngles, SeventyThreeAnglesAreCentred) {
  const ArrayGeometry g = l11();
  const auto a = steering_angle_set(g, 73);
  ASSERT_EQ(a.size(), 73u);
  EXPECT_EQ(a[36], 0.0);
  // 36 * lambda / L with the 0.3 mm pitch.
  EXPECT_NEAR(a.back(), 0.18996710526315788, 1e-12);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], -a[a.size() - 1 - i]);
}

TEST(SteeringAngles, UniformSpacingAndBound) {
  const ArrayGeometry g = l11();
  const double step = g.wavelength() / g.aperture();
  for (int count : {2, 5, 16, 73, 127, 128}) {
    const auto a = steering_angle_set(g, count);
    ASSERT_EQ(a.size(), static_cast<std::size_t>(count));
    for (std::size_t i = 1; i < a.size(); ++i) {
      EXPECT_GT(a[i], a[i - 1]);
      EXPECT_NEAR(a[i] - a[i - 1], step, 1e-12 * step);
    }
    EXPECT_LE(std::abs(a.front()), 64 * step * (1 + 1e-12));
  }
}

TEST(SteeringAngles, RejectsOutOfRangeCount) {
  EXPECT_THROW(steering_angle_set(l11(), 0), ValidationError);
  EXPECT_THROW(steering_angle_set(l11(), 129), ValidationError);
}

TEST(UniformSpan, EndpointsAndCentre) {
  const double max = 18.0 * std::numbers::pi / 180.0;
  const auto a = uniform_angle_span(73, max);
  ASSERT_EQ(a.size(), 73u);
  EXPECT_DOUBLE_EQ(a.front(), -max);
  EXPECT_DOUBLE_EQ(a.back(), max);
  EXPECT_EQ(a[36], 0.0);
  EXPECT_EQ(uniform_angle_span(1, max), std::vector<double>{0.0});
}

TEST(ImagingGridTest, UniformGrid) {
  const ImagingGrid g = ImagingGrid::uniform(-1e-3, 1e-3, 0.5e-3, 0.0, 2e-3, 1e-3);
  EXPECT_EQ(g.cols(), 5u);
  EXPECT_EQ(g.rows(), 3u);
  EXPECT_NO_THROW(g.validate());
}

TEST(ImagingGridTest, RejectsNonMonotoneOrNegativeDepth) {
  ImagingGrid g{{0.0, 0.0}, {1e-3}};
  EXPECT_THROW(g.validate(), ValidationError);
  ImagingGrid h{{0.0, 1e-3}, {-1e-3, 1e-3}};
  EXPECT_THROW(h.validate(), ValidationError);
}

TEST(ValidateSweep, ConsistentFramesPass) {
  const ArrayGeometry g = l11();
  RfSweep sweep(g, {frame(-0.1, 64, 128), frame(0.0, 64, 128), frame(0.1, 64, 128)});
  EXPECT_NO_THROW(validate_sweep(sweep));
}

TEST(ValidateSweep, ReportsFrameWithWrongColumnCount) {
  const ArrayGeometry g = l11();
  RfSweep sweep(g, {frame(0.0, 64, 128), frame(0.1, 64, 127)});
  try {
    validate_sweep(sweep);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("frame 1"), std::string::npos) << e.what();
  }
}

TEST(ValidateSweep, RejectsEmptyDuplicateAndSteepFrames) {
  const ArrayGeometry g = l11();
  EXPECT_THROW(validate_sweep(RfSweep(g, {})), ValidationError);
  EXPECT_THROW(validate_sweep(RfSweep(g, {frame(0.1, 8, 128), frame(0.1, 8, 128)})),
               ValidationError);
  EXPECT_THROW(validate_sweep(RfSweep(g, {frame(0.0, 8, 128), frame(0.1, 9, 128)})),
               ValidationError);
  EXPECT_THROW(validate_sweep(RfSweep(g, {frame(std::numbers::pi / 2, 8, 128)})),
               ValidationError);
}
