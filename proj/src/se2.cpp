#include "fs2d/se2.hpp"

#include <cmath>

namespace fs2d {

double normalize_angle(double radians) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double a = std::fmod(radians, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  if (a > std::numbers::pi) a -= kTwoPi;
  return a;
}

RigidMotion2D make_motion(double dx, double dy, double theta) {
  return {dx, dy, normalize_angle(theta)};
}

Pose2D compose(const Pose2D& pose, const RigidMotion2D& motion) {
  const double c = std::cos(pose.heading);
  const double s = std::sin(pose.heading);
  return {pose.x + c * motion.dx - s * motion.dy,
          pose.y + s * motion.dx + c * motion.dy,
          normalize_angle(pose.heading + motion.theta), pose.timestamp};
}

RigidMotion2D compose(const RigidMotion2D& a, const RigidMotion2D& b) {
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  return {a.dx + c * b.dx - s * b.dy, a.dy + s * b.dx + c * b.dy,
          normalize_angle(a.theta + b.theta)};
}

RigidMotion2D invert(const RigidMotion2D& m) {
  const double c = std::cos(m.theta);
  const double s = std::sin(m.theta);
  return {-(c * m.dx + s * m.dy), s * m.dx - c * m.dy, normalize_angle(-m.theta)};
}

RigidMotion2D relative_motion(const Pose2D& from, const Pose2D& to) {
  const double c = std::cos(from.heading);
  const double s = std::sin(from.heading);
  const double ex = to.x - from.x;
  const double ey = to.y - from.y;
  return {c * ex + s * ey, -s * ex + c * ey,
          normalize_angle(to.heading - from.heading)};
}

}  // namespace fs2d
