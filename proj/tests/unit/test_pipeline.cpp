#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>

#include "usbeam/error.hpp"
#include "usbeam/pipeline.hpp"

using namespace usbeam;
namespace fs = std::filesystem;

namespace {

PipelineConfig small_config() {
  PipelineConfig c;
  c.angle_count = 9;
  c.x_min = -4e-3;
  c.x_max = 4e-3;
  c.z_min = 16e-3;
  c.z_max = 24e-3;
  c.threads = 1;
  return c;
}

Phantom point() { return Phantom({{{0.0, 20e-3}, 1.0}}, {}); }

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

fs::path run_into(const PipelineConfig& config, const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "usbeam_test_pipeline" / name;
  fs::remove_all(dir);
  write_pipeline_outputs(run_pipeline(config, point()), config, dir);
  return dir;
}

}  // namespace

TEST(Pipeline, ProducesAllProducts) {
  const PipelineConfig config = small_config();
  const PipelineResult r = run_pipeline(config, point());
  EXPECT_EQ(r.angles.size(), 9u);
  EXPECT_EQ(r.spw_frame.steering_angle, 0.0);
  EXPECT_TRUE(r.cpwc_bmode.values.same_shape(r.bpm.values));
  EXPECT_TRUE(r.beam.values.same_shape(r.bpm.values));
  EXPECT_EQ(r.grid.rows(), r.bpm.values.rows());
  EXPECT_NEAR(r.cpwc_point.peak.z, 20e-3, 0.2e-3);
  EXPECT_NEAR(r.cpwc_point.peak.x, 0.0, 0.3e-3);
  EXPECT_LT(r.cpwc_point.lateral_fwhm, r.spw_point.lateral_fwhm);
  EXPECT_TRUE(r.spw_metrics.ssim.has_value());
  EXPECT_FALSE(r.beam_metrics.ssim.has_value());

  const std::string report = pipeline_report(r, config);
  EXPECT_NE(report.find("config_digest " + config.digest_hex()), std::string::npos);
  EXPECT_NE(report.find("beam.cr_db "), std::string::npos);
}

TEST(Pipeline, OutputsAreByteIdenticalAcrossRunsAndThreads) {
  PipelineConfig config = small_config();
  const fs::path a = run_into(config, "a");
  const fs::path b = run_into(config, "b");
  config.threads = 3;
  const fs::path c = run_into(config, "c");
  for (const std::string& name : pipeline_output_names()) {
    ASSERT_TRUE(fs::exists(a / name)) << name;
    const std::string ref = slurp(a / name);
    EXPECT_FALSE(ref.empty());
    EXPECT_EQ(slurp(b / name), ref) << name;
    EXPECT_EQ(slurp(c / name), ref) << name;
  }
}

TEST(Pipeline, SeedChangesNoisyOutput) {
  PipelineConfig config = small_config();
  const Image first = run_pipeline(config, point()).spw_bmode.values;
  config.seed = 1;
  EXPECT_NE(run_pipeline(config, point()).spw_bmode.values, first);
}

TEST(Pipeline, FailuresNameTheStage) {
  PipelineConfig config = small_config();
  config.dynamic_range = 0.0;
  try {
    run_pipeline(config, point());
    FAIL() << "expected StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "config");
  }
  config = small_config();
  config.bpm.bank.wavelengths = {16.0, 512.0};
  try {
    run_pipeline(config, point());
    FAIL() << "expected StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "bpm");
    EXPECT_NE(std::string(e.what()).find("wavelength"), std::string::npos);
  }
}
