#pragma once

// Scene builders shared by the unit and acceptance suites. Ground truth comes
// from the generator, never from the registration path.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fs2d/dataset.hpp"
#include "fs2d/grid.hpp"
#include "fs2d/se2.hpp"

namespace fs2d::testing {

inline SensorSpec default_sensor() {
  SensorSpec s;
  s.max_range = 90.0;
  s.azimuth_count = 400;
  s.range_resolution = 0.25;
  return s;
}

/// Random cluttered static scene: walls at random orientations, a few blocks
/// and scattered point reflectors, all within `radius` of the origin.
inline SceneSpec random_scene(std::uint64_t seed, double radius = 70.0, int walls = 8,
                              int blocks = 5, int points = 60) {
  std::mt19937_64 rng(seed * 7919 + 17);
  std::uniform_real_distribution<double> pos(-radius, radius);
  std::uniform_real_distribution<double> angle(-180.0, 180.0);
  std::uniform_real_distribution<double> refl(0.5, 1.0);
  std::uniform_real_distribution<double> wall_len(8.0, 30.0);
  std::uniform_real_distribution<double> block_len(2.0, 6.0);

  SceneSpec spec;
  spec.sensor = default_sensor();
  spec.seed = seed;
  auto place = [&](SceneObject obj) {
    do {
      obj.pose.x = pos(rng);
      obj.pose.y = pos(rng);
    } while (std::hypot(obj.pose.x, obj.pose.y) > radius ||
             std::hypot(obj.pose.x, obj.pose.y) < 6.0);
    obj.pose.heading = deg2rad(angle(rng));
    obj.reflectivity = refl(rng);
    spec.static_targets.push_back(obj);
  };
  for (int i = 0; i < walls; ++i) place({WallShape{wall_len(rng)}, {}, 1.0, {}});
  for (int i = 0; i < blocks; ++i) place({BlockShape{block_len(rng), block_len(rng)}, {}, 1.0, {}});
  for (int i = 0; i < points; ++i) place({PointShape{}, {}, 1.0, {}});
  return spec;
}

/// Two-frame sequence whose second sensor pose is `motion` from the first.
inline SynthOutput render_pair(SceneSpec spec, const RigidMotion2D& motion) {
  spec.sensor_start = {};
  spec.ego_motion_per_frame = motion;
  return synth_scene(spec, 2);
}

struct TwoBodyScene {
  SceneSpec spec;
  RigidMotion2D ego;          // sensor motion between the two frames
  double object_dx = 0.0;     // world translation of the moving body
  double object_dy = 0.0;
  /// Motion a registration reports when it locks onto the moving body.
  RigidMotion2D object_hypothesis() const {
    return {ego.dx - object_dx, ego.dy - object_dy, ego.theta};
  }
};

/// Static background plus one rigid body of point scatterers and a block that
/// translates by 3 to 9 m between the frames. The body carries a share of
/// the returns comparable to the background, as a large nearby vehicle does.
inline TwoBodyScene two_body_scene(std::uint64_t seed, double max_translation = 10.0,
                                   double max_rotation_deg = 20.0) {
  TwoBodyScene out;
  out.spec = random_scene(seed, 60.0, 4, 2, 40);
  std::mt19937_64 rng(seed * 104729 + 3);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> range(12.0, 30.0);
  std::uniform_real_distribution<double> travel(3.0, 9.0);
  const double bearing = angle(rng);
  const double dist = range(rng);
  const double cx = dist * std::cos(bearing);
  const double cy = dist * std::sin(bearing);
  const double heading = angle(rng);
  const double len = travel(rng);
  out.object_dx = len * std::cos(heading);
  out.object_dy = len * std::sin(heading);
  // Parts move by the same world translation, expressed in each part's frame.
  auto add = [&](Shape shape, double px, double py, double h) {
    const RigidMotion2D body{std::cos(h) * out.object_dx + std::sin(h) * out.object_dy,
                             -std::sin(h) * out.object_dx + std::cos(h) * out.object_dy, 0.0};
    out.spec.moving_objects.push_back({shape, {cx + px, cy + py, h, 0.0}, 1.0, body});
  };
  // Keep the line of sight to the body clear of background structure.
  std::erase_if(out.spec.static_targets, [&](const SceneObject& obj) {
    const double along = std::clamp((obj.pose.x * cx + obj.pose.y * cy) / (dist * dist), 0.0, 1.0);
    return std::hypot(obj.pose.x - along * cx, obj.pose.y - along * cy) < 18.0;
  });
  add(BlockShape{5.0, 2.5}, 0.0, 0.0, heading);
  for (int i = 0; i < 30; ++i) {
    double px;
    double py;
    do {
      px = 5.0 * unit(rng);
      py = 5.0 * unit(rng);
    } while (std::hypot(px, py) > 5.0);
    add(PointShape{}, px, py, 0.0);
  }
  std::uniform_real_distribution<double> t(-max_translation, max_translation);
  std::uniform_real_distribution<double> r(-max_rotation_deg, max_rotation_deg);
  const double ex = t(rng);
  const double ey = t(rng);
  out.ego = make_motion(ex, ey, deg2rad(r(rng)));
  out.spec.sensor_start = {};
  out.spec.ego_motion_per_frame = out.ego;
  return out;
}

inline RigidMotion2D random_motion(std::mt19937_64& rng, double max_translation,
                                   double max_rotation_deg) {
  std::uniform_real_distribution<double> t(-max_translation, max_translation);
  std::uniform_real_distribution<double> r(-max_rotation_deg, max_rotation_deg);
  const double dx = t(rng);
  const double dy = t(rng);
  return make_motion(dx, dy, deg2rad(r(rng)));
}

}  // namespace fs2d::testing
