#include "doctest.h"

#include <cmath>
#include <sstream>

#include "fs2d/dataset.hpp"
#include "fs2d/errors.hpp"
#include "fs2d/spectral.hpp"
#include "../support/scenes.hpp"

using namespace fs2d;

namespace {

SceneSpec parse(const std::string& text) {
  std::istringstream in(text);
  return parse_scene_spec(in);
}

std::string parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("static point without noise renders identical frames") {
  SceneSpec spec;
  spec.static_targets.push_back({PointShape{}, {20.0, 5.0, 0.0, 0.0}, 0.8, {}});
  const SynthOutput out = synth_scene(spec, 3);
  REQUIRE(out.frames.size() == 3);
  CHECK(out.frames[0].scan.intensities == out.frames[1].scan.intensities);
  CHECK(out.frames[1].scan.intensities == out.frames[2].scan.intensities);
  CHECK(out.frames[1].scan.timestamp == doctest::Approx(spec.sensor.scan_period));
  float peak = 0.0f;
  for (float v : out.frames[0].scan.intensities.values()) peak = std::max(peak, v);
  CHECK(peak > 0.5f);
  CHECK_NOTHROW(out.frames[0].scan.validate());
}

TEST_CASE("generator is deterministic under the seed") {
  SceneSpec spec = testing::random_scene(61);
  spec.noise = {0.02, 2, 0.05};
  spec.ego_motion_per_frame = make_motion(1.0, 0.2, 0.01);
  const SynthOutput a = synth_scene(spec, 3);
  const SynthOutput b = synth_scene(spec, 3);
  for (std::size_t f = 0; f < 3; ++f) {
    CHECK(a.frames[f].scan == b.frames[f].scan);
    CHECK(a.frames[f].corrupted_bins == b.frames[f].corrupted_bins);
  }
  spec.seed += 1;
  const SynthOutput c = synth_scene(spec, 1);
  CHECK_FALSE(c.frames[0].scan == a.frames[0].scan);
}

TEST_CASE("one cell of forward motion moves the grid by one cell") {
  SceneSpec spec;
  spec.static_targets.push_back({WallShape{20.0}, {20.0, 3.0, deg2rad(90.0), 0.0}, 1.0, {}});
  spec.static_targets.push_back({WallShape{15.0}, {-5.0, 25.0, 0.0, 0.0}, 1.0, {}});
  spec.ego_motion_per_frame = make_motion(0.75, 0.0, 0.0);
  const SynthOutput out = synth_scene(spec, 3);
  GridConfig cfg;
  cfg.window = Window::kNone;
  for (std::size_t f = 0; f + 1 < out.frames.size(); ++f) {
    const CartesianGrid a = polar_to_cartesian(out.frames[f].scan, cfg);
    const CartesianGrid b = polar_to_cartesian(out.frames[f + 1].scan, cfg);
    // Scene content moves backwards in the sensor frame.
    CHECK(phase_correlate(a, b).argmax() == Shift{-1, 0});
  }
}

TEST_CASE("salt-and-pepper density on a 400 x 512 scan") {
  SceneSpec spec;
  spec.sensor.azimuth_count = 400;
  spec.sensor.range_resolution = 0.25;
  spec.sensor.max_range = 511 * 0.25;
  spec.noise.salt_pepper_density = 0.05;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    spec.seed = seed;
    const SynthOutput out = synth_scene(spec, 1);
    const PolarScan& s = out.frames[0].scan;
    REQUIRE(s.intensities.rows() == 400);
    REQUIRE(s.intensities.cols() == 512);
    const double fraction = double(out.frames[0].corrupted_bins) / (400.0 * 512.0);
    CHECK(fraction >= 0.045);
    CHECK(fraction <= 0.055);
    // An empty scene shows the salt directly: about half the hits are 1.
    std::size_t ones = 0;
    for (float v : s.intensities.values()) ones += v == 1.0f;
    CHECK(std::abs(double(ones) / out.frames[0].corrupted_bins - 0.5) < 0.05);
  }
}

TEST_CASE("ghost beams are full-length streaks") {
  SceneSpec spec;
  spec.noise.ghost_beam_count = 2;
  spec.seed = 9;
  const SynthOutput out = synth_scene(spec, 1);
  const PolarScan& s = out.frames[0].scan;
  int streaks = 0;
  for (std::size_t a = 0; a < s.azimuth_count(); ++a) {
    bool lit = true;
    for (float v : s.intensities.row(a)) lit = lit && v >= 0.5f;
    streaks += lit;
  }
  CHECK(streaks >= 1);
  CHECK(streaks <= 2);
}

TEST_CASE("moving objects follow their body-frame motion") {
  SceneSpec spec;
  spec.moving_objects.push_back(
      {BlockShape{4.0, 2.0}, {10.0, 5.0, deg2rad(90.0), 0.0}, 1.0, make_motion(1.0, 0.0, 0.0)});
  spec.moving_objects.push_back({PointShape{}, {200.0, 0.0, 0.0, 0.0}, 1.0, make_motion(-60.0, 0.0, 0.0)});
  const SynthOutput out = synth_scene(spec, 3);
  REQUIRE(out.object_poses.size() == 2);
  REQUIRE(out.object_poses[0].size() == 3);
  CHECK(out.object_poses[0][2].x == doctest::Approx(10.0));
  CHECK(out.object_poses[0][2].y == doctest::Approx(7.0));
  CHECK(out.object_poses[1][2].x == doctest::Approx(80.0));
  REQUIRE(out.warnings.size() == 1);
  CHECK(out.warnings[0].find("moving object 1") != std::string::npos);
  // The far point enters range by the last frame.
  const PolarScan& last = out.frames[2].scan;
  const std::size_t bin = static_cast<std::size_t>(std::lround(80.0 / last.range_resolution));
  CHECK(last.intensities(0, bin) > 0.5f);
}

TEST_CASE("walls hide what lies behind them") {
  SceneSpec spec;
  spec.static_targets.push_back({WallShape{10.0}, {10.0, 0.0, deg2rad(90.0), 0.0}, 1.0, {}});
  spec.static_targets.push_back({PointShape{}, {30.0, 0.0, 0.0, 0.0}, 1.0, {}});
  const PolarScan s = synth_scene(spec, 1).frames[0].scan;
  const auto wall_bin = static_cast<std::size_t>(10.0 / s.range_resolution);
  const auto point_bin = static_cast<std::size_t>(30.0 / s.range_resolution);
  CHECK(s.intensities(0, wall_bin) > 0.9f);
  CHECK(s.intensities(0, point_bin) == 0.0f);
}

TEST_CASE("ground truth follows the sensor") {
  SceneSpec spec;
  spec.sensor_start = {1.0, 2.0, 0.5, 0.0};
  spec.ego_motion_per_frame = make_motion(2.0, 0.0, 0.1);
  const SynthOutput out = synth_scene(spec, 4);
  const auto gt = out.ground_truth();
  REQUIRE(gt.size() == 4);
  Pose2D p = spec.sensor_start;
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(gt[i].pose.x == doctest::Approx(p.x));
    CHECK(gt[i].pose.y == doctest::Approx(p.y));
    CHECK(gt[i].timestamp == doctest::Approx(i * spec.sensor.scan_period));
    p = compose(p, spec.ego_motion_per_frame);
  }
}

TEST_CASE("scene spec parsing") {
  const SceneSpec spec = parse(
      "# demo\n"
      "seed = 42\n"
      "sensor.max_range = 80\n"
      "sensor.azimuth_count = 360\n"
      "sensor.start = 1 2 90\n"
      "ego.motion = 0.75 0 1.5\n"
      "noise.salt_pepper = 0.05\n"
      "noise.ghost_beams = 2\n"
      "static = point 10 5 0.9\n"
      "static = wall 20 0 90 15 1.0\n"
      "static = block -10 8 30 4 2 0.7\n"
      "moving = block 5 5 0 4 2 1.0 motion 1 0 0\n");
  CHECK(spec.seed == 42);
  CHECK(spec.sensor.max_range == 80.0);
  CHECK(spec.sensor.azimuth_count == 360);
  CHECK(spec.sensor_start.heading == doctest::Approx(deg2rad(90.0)));
  CHECK(spec.ego_motion_per_frame.theta == doctest::Approx(deg2rad(1.5)));
  CHECK(spec.noise.ghost_beam_count == 2);
  REQUIRE(spec.static_targets.size() == 3);
  CHECK(std::holds_alternative<WallShape>(spec.static_targets[1].shape));
  CHECK(std::get<BlockShape>(spec.static_targets[2].shape).width == 2.0);
  REQUIRE(spec.moving_objects.size() == 1);
  CHECK(spec.moving_objects[0].motion_per_frame.dx == 1.0);
}

TEST_CASE("scene spec errors name the field") {
  CHECK(parse_error("sensor.fov = 3\n").find("sensor.fov") != std::string::npos);
  CHECK(parse_error("noise.salt_pepper = 2\n").find("noise.salt_pepper") != std::string::npos);
  CHECK(parse_error("seed = x\n").find("seed") != std::string::npos);
  CHECK(parse_error("static = circle 1 2 3\n").find("circle") != std::string::npos);
  CHECK(parse_error("moving = point 1 2 1\n").find("motion") != std::string::npos);
  CHECK(parse_error("ego.motion = 1 2\n").find("ego.motion") != std::string::npos);
  CHECK(parse_error("just text\n").find("line 1") != std::string::npos);
  CHECK(parse_error("noise.ghost_beams = 1.5\n").find("noise.ghost_beams") != std::string::npos);
}
