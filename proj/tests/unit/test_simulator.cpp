#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "usbeam/error.hpp"
#include "usbeam/simulator.hpp"

using namespace usbeam;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

ArrayGeometry l11() { return make_linear_array(128, 0.3e-3, 7.6e6, 31.25e6, 1540.0); }

Phantom point(double x, double z, double reflectivity = 1.0) {
  return Phantom({{{x, z}, reflectivity}}, {});
}

double max_abs(const PlaneWaveFrame& f) {
  double m = 0.0;
  for (double v : f.samples.values()) m = std::max(m, std::abs(v));
  return m;
}

std::size_t argmax_column(const PlaneWaveFrame& f, std::size_t k) {
  std::size_t best = 0;
  for (std::size_t n = 1; n < f.sample_count(); ++n) {
    if (f.samples(n, k) > f.samples(best, k)) best = n;
  }
  return best;
}

}  // namespace

TEST(Pulse, PeaksAtZeroAndIsTruncatedBelowMinus80dB) {
  const PulseModel p;
  EXPECT_DOUBLE_EQ(p(0.0), 1.0);
  const double h = p.half_duration();
  EXPECT_GT(h, 0.0);
  // Envelope at the truncation point is 1e-4.
  const double envelope = std::abs(p(h)) / std::max(1e-300, std::abs(std::cos(2 * std::numbers::pi * p.center_frequency * h)));
  EXPECT_NEAR(envelope, 1e-4, 1e-9);
}

TEST(Pulse, RejectsBandwidthOutOfRange) {
  EXPECT_THROW((PulseModel{7.6e6, 0.0}.validate()), ValidationError);
  EXPECT_THROW((PulseModel{7.6e6, 2.0}.validate()), ValidationError);
  EXPECT_THROW((PulseModel{0.0, 0.5}.validate()), ValidationError);
}

TEST(PhantomTest, RejectsEmptyAndInvalidMembers) {
  EXPECT_THROW(Phantom({}, {}), ValidationError);
  EXPECT_THROW(point(0.0, 0.0), ValidationError);
  EXPECT_THROW(Phantom({}, {SpecularSurface{{{0.0, 0.01}}, 1.0, 0.1}}), ValidationError);
  EXPECT_THROW(Phantom({}, {SpecularSurface{{{0.0, 0.01}, {0.01, 0.01}}, 1.0, 0.0}}),
               ValidationError);
}

TEST(SimulateFrame, OnAxisEchoArrivesAtRoundTripTime) {
  const ArrayGeometry g = l11();
  const PulseModel pulse;
  const Phantom ph = point(0.0, 0.02);
  const std::size_t n = required_samples(ph, g, 0.0, pulse);
  const PlaneWaveFrame f = simulate_frame(ph, g, 0.0, pulse, n);
  // Elements 63 and 64 straddle x = 0.
  const double expected = 0.02 / 1540.0 + std::hypot(0.02, g.element_x(64)) / 1540.0;
  EXPECT_NEAR(expected, 25.97e-6, 0.01e-6);
  const double t = static_cast<double>(argmax_column(f, 64)) / g.sampling_frequency;
  EXPECT_LE(std::abs(t - expected), 1.0 / g.sampling_frequency);
}

TEST(SimulateFrame, MatchesDirectPulseEvaluation) {
  const ArrayGeometry g = l11();
  const PulseModel pulse;
  const double angle = 7.0 * kDeg;
  const Point2 p{3e-3, 15e-3};
  const Phantom ph({{p, 0.7}}, {});
  const PlaneWaveFrame f = simulate_frame(ph, g, angle, pulse, required_samples(ph, g, angle, pulse));
  const double h = pulse.half_duration();
  for (int k : {0, 17, 64, 127}) {
    // Independent time of flight: plane-wave front plus straight return path.
    const double tof = (p.z * std::cos(angle) + p.x * std::sin(angle)) / 1540.0 +
                       std::sqrt(p.z * p.z + (p.x - g.element_x(k)) * (p.x - g.element_x(k))) / 1540.0;
    for (std::size_t n = 0; n < f.sample_count(); ++n) {
      const double tau = static_cast<double>(n) / g.sampling_frequency - tof;
      if (std::abs(std::abs(tau) - h) < 1e-12) continue;
      const double expected = std::abs(tau) <= h ? 0.7 * pulse(tau) : 0.0;
      ASSERT_NEAR(f.samples(n, static_cast<std::size_t>(k)), expected, 1e-9) << "k=" << k << " n=" << n;
    }
  }
}

TEST(SimulateFrame, ZeroReflectivityGivesZeroFrame) {
  const ArrayGeometry g = l11();
  const Phantom ph = point(0.0, 0.02, 0.0);
  const PlaneWaveFrame f = simulate_frame(ph, g, 0.0, PulseModel{}, 1200);
  EXPECT_EQ(max_abs(f), 0.0);
}

TEST(SimulateFrame, RejectsShortWindowAndNamesRequiredSamples) {
  const ArrayGeometry g = l11();
  const Phantom ph = point(0.0, 0.02);
  const std::size_t need = required_samples(ph, g, 0.0, PulseModel{});
  EXPECT_NO_THROW(simulate_frame(ph, g, 0.0, PulseModel{}, need));
  try {
    simulate_frame(ph, g, 0.0, PulseModel{}, need - 1);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find(std::to_string(need)), std::string::npos) << e.what();
  }
}

TEST(SimulateFrame, Superposition) {
  const ArrayGeometry g = l11();
  const PulseModel pulse;
  const PointScatterer a{{-2e-3, 12e-3}, 0.8};
  const PointScatterer b{{4e-3, 18e-3}, -0.3};
  const Phantom both({a, b}, {});
  const std::size_t n = required_samples(both, g, 0.1, pulse);
  const auto fa = simulate_frame(Phantom({a}, {}), g, 0.1, pulse, n);
  const auto fb = simulate_frame(Phantom({b}, {}), g, 0.1, pulse, n);
  const auto fab = simulate_frame(both, g, 0.1, pulse, n);
  const double scale = max_abs(fab);
  for (std::size_t i = 0; i < fab.samples.size(); ++i) {
    ASSERT_NEAR(fab.samples.values()[i], fa.samples.values()[i] + fb.samples.values()[i], 1e-12 * scale);
  }
}

TEST(SimulateFrame, SpecularEchoWeakensWithSteering) {
  const ArrayGeometry g = l11();
  const PulseModel pulse;
  const Phantom ph({}, {SpecularSurface{{{-10e-3, 25e-3}, {10e-3, 25e-3}}, 1.0, 0.17}});
  const std::size_t n = std::max(required_samples(ph, g, 0.0, pulse), required_samples(ph, g, 18 * kDeg, pulse));
  const double at0 = max_abs(simulate_frame(ph, g, 0.0, pulse, n));
  const double at18 = max_abs(simulate_frame(ph, g, 18 * kDeg, pulse, n));
  EXPECT_GT(at0, 0.0);
  EXPECT_LT(at18, at0);
}

TEST(SpecularGain, MonotoneInMismatchAndSymmetric) {
  const Point2 a{-1e-3, 20e-3};
  const Point2 b{1e-3, 20e-3};
  EXPECT_DOUBLE_EQ(specular_gain(a, b, 0.0, 0.17), 1.0);
  double previous = 1.0;
  for (int deg = 1; deg <= 40; ++deg) {
    const double gain = specular_gain(a, b, deg * kDeg, 0.17);
    EXPECT_LE(gain, previous);
    EXPECT_NEAR(gain, specular_gain(a, b, -deg * kDeg, 0.17), 1e-15);
    previous = gain;
  }
  // On a flat mirror the mismatch is the steering angle itself.
  EXPECT_NEAR(specular_gain(a, b, 0.1, 0.17), std::exp(-std::pow(0.1 / 0.17, 2)), 1e-12);
}

TEST(SpecularGain, TiltedSegmentReturnsTwiceItsTilt) {
  // Rising by beta towards +x, the segment mirrors a wave steered by 2 beta straight back up.
  const double beta = 6.0 * kDeg;
  const Point2 a{0.0, 20e-3};
  const Point2 b{std::cos(beta) * 1e-3, 20e-3 - std::sin(beta) * 1e-3};
  EXPECT_NEAR(specular_gain(a, b, 2 * beta, 0.17), 1.0, 1e-12);
  EXPECT_NEAR(specular_gain(a, b, 0.0, 0.17), std::exp(-std::pow(2 * beta / 0.17, 2)), 1e-12);
  EXPECT_LT(specular_gain(a, b, -beta, 0.17), specular_gain(a, b, beta, 0.17));
}

TEST(SimulateSweep, SingletonMatchesFrame) {
  const ArrayGeometry g = l11();
  const Phantom ph = point(1e-3, 15e-3);
  const std::size_t n = required_samples(ph, g, 0.0, PulseModel{});
  const std::vector<double> angles{0.0};
  const RfSweep sweep = simulate_sweep(ph, g, angles, PulseModel{}, n);
  ASSERT_EQ(sweep.size(), 1u);
  EXPECT_EQ(sweep[0].samples, simulate_frame(ph, g, 0.0, PulseModel{}, n).samples);
}

TEST(SimulateSweep, SeventyThreeAnglesGiveSeventyThreeFrames) {
  ArrayGeometry g = make_linear_array(16, 0.3e-3, 7.6e6, 31.25e6, 1540.0);
  const Phantom ph = point(0.0, 5e-3);
  const auto angles = uniform_angle_span(73, 18 * kDeg);
  std::size_t n = 0;
  for (double a : angles) n = std::max(n, required_samples(ph, g, a, PulseModel{}));
  const RfSweep sweep = simulate_sweep(ph, g, angles, PulseModel{}, n, 2);
  ASSERT_EQ(sweep.size(), 73u);
  EXPECT_NO_THROW(validate_sweep(sweep));
  // Independent of the worker count.
  const RfSweep serial = simulate_sweep(ph, g, angles, PulseModel{}, n, 1);
  for (std::size_t i = 0; i < 73; ++i) EXPECT_EQ(sweep[i].samples, serial[i].samples);
}

TEST(SimulateSweep, OppositeAnglesMirrorAcrossArrayCentre) {
  const ArrayGeometry g = l11();
  const PulseModel pulse;
  const std::vector<double> angles{-0.1, 0.0, 0.1};
  auto check = [&](const Phantom& left, const Phantom& right) {
    std::size_t n = 0;
    for (double a : angles) n = std::max({n, required_samples(left, g, a, pulse), required_samples(right, g, a, pulse)});
    const RfSweep l = simulate_sweep(left, g, angles, pulse, n);
    const RfSweep r = simulate_sweep(right, g, angles, pulse, n);
    const double scale = max_abs(l[2]);
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t k = 0; k < 128; ++k) {
        ASSERT_NEAR(l[2].samples(s, k), r[0].samples(s, 127 - k), 1e-6 * scale);
      }
    }
  };
  check(point(0.0, 15e-3), point(0.0, 15e-3));
  check(point(3e-3, 15e-3), point(-3e-3, 15e-3));
}

TEST(AddNoise, VanishingNoiseLeavesFrameUnchanged) {
  const ArrayGeometry g = l11();
  const Phantom ph = point(0.0, 0.01);
  const auto f = simulate_frame(ph, g, 0.0, PulseModel{}, required_samples(ph, g, 0.0, PulseModel{}));
  const auto noisy = add_noise(f, 300.0, 1);
  const double scale = max_abs(f);
  for (std::size_t i = 0; i < f.samples.size(); ++i) {
    ASSERT_NEAR(noisy.samples.values()[i], f.samples.values()[i], 1e-10 * scale);
  }
}

TEST(AddNoise, DeterministicForSeed) {
  const ArrayGeometry g = l11();
  const Phantom ph = point(0.0, 0.01);
  const auto f = simulate_frame(ph, g, 0.0, PulseModel{}, required_samples(ph, g, 0.0, PulseModel{}));
  EXPECT_EQ(add_noise(f, 10.0, 42).samples, add_noise(f, 10.0, 42).samples);
  EXPECT_NE(add_noise(f, 10.0, 42).samples, add_noise(f, 10.0, 43).samples);
}

TEST(AddNoise, MeasuredSnrMatchesRequest) {
  const ArrayGeometry g = l11();
  const Phantom ph = point(0.0, 0.01);
  const auto f = simulate_frame(ph, g, 0.0, PulseModel{}, required_samples(ph, g, 0.0, PulseModel{}));
  const auto noisy = add_noise(f, 0.0, 7);
  double signal = 0.0;
  double noise = 0.0;
  for (std::size_t i = 0; i < f.samples.size(); ++i) {
    const double s = f.samples.values()[i];
    const double d = noisy.samples.values()[i] - s;
    signal += s * s;
    noise += d * d;
  }
  EXPECT_NEAR(10.0 * std::log10(signal / noise), 0.0, 0.5);
}

TEST(AddNoise, RejectsNonFiniteSnrAndEmptyFrame) {
  PlaneWaveFrame f{0.0, Array2D<double>(4, 2, 1.0), 0.0};
  EXPECT_THROW(add_noise(f, std::nan(""), 1), ValidationError);
  EXPECT_THROW(add_noise(f, INFINITY, 1), ValidationError);
  EXPECT_THROW(add_noise(PlaneWaveFrame{}, 10.0, 1), ValidationError);
}

TEST(Speckle, CountFromDensityAndReproducible) {
  const auto a = speckle_region(-1e-3, 1e-3, 5e-3, 6e-3, 1e7, 0.2, 9);
  EXPECT_EQ(a.size(), 20u);
  const auto b = speckle_region(-1e-3, 1e-3, 5e-3, 6e-3, 1e7, 0.2, 9);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].position.x, b[i].position.x);
    EXPECT_EQ(a[i].reflectivity, b[i].reflectivity);
    EXPECT_GE(a[i].position.x, -1e-3);
    EXPECT_LE(a[i].position.z, 6e-3);
  }
  EXPECT_THROW(speckle_region(1e-3, -1e-3, 5e-3, 6e-3, 1e7, 0.2, 9), ValidationError);
}

TEST(BonePhantom, SeedDeterminesPhantom) {
  const Phantom a = make_bone_phantom(3);
  const Phantom b = make_bone_phantom(3);
  const Phantom c = make_bone_phantom(4);
  ASSERT_EQ(a.surfaces().size(), 1u);
  EXPECT_EQ(a.surfaces()[0].polyline.size(), b.surfaces()[0].polyline.size());
  EXPECT_EQ(a.surfaces()[0].polyline[5].z, b.surfaces()[0].polyline[5].z);
  EXPECT_NE(a.surfaces()[0].polyline[5].z, c.surfaces()[0].polyline[5].z);
  EXPECT_GT(a.scatterers().size(), 1000u);
}
