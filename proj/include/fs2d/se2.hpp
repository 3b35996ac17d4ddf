#pragma once

#include <numbers>

namespace fs2d {

/// Wraps an angle to (-pi, pi].
double normalize_angle(double radians);

inline constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Relative planar motion. For a pair of scans (A, B) this is the pose of B
/// expressed in the frame of A: a point with coordinates b in B's frame has
/// coordinates R(theta) * b + (dx, dy) in A's frame.
struct RigidMotion2D {
  double dx = 0.0;     // meters
  double dy = 0.0;     // meters
  double theta = 0.0;  // radians, (-pi, pi]

  static RigidMotion2D identity() { return {}; }
  bool operator==(const RigidMotion2D&) const = default;
};

struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // radians, (-pi, pi]
  double timestamp = 0.0;

  bool operator==(const Pose2D&) const = default;
};

/// Constructs a motion with its angle normalized.
RigidMotion2D make_motion(double dx, double dy, double theta);

/// Applies a body-frame motion to a pose. The timestamp is carried over.
Pose2D compose(const Pose2D& pose, const RigidMotion2D& motion);

/// Motion composition a then b (both body-frame).
RigidMotion2D compose(const RigidMotion2D& a, const RigidMotion2D& b);

RigidMotion2D invert(const RigidMotion2D& motion);

/// Motion taking pose `from` to pose `to`, expressed in the frame of `from`.
RigidMotion2D relative_motion(const Pose2D& from, const Pose2D& to);

}  // namespace fs2d
