#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "fs2d/dataset.hpp"
#include "fs2d/errors.hpp"
#include "text_util.hpp"

namespace fs2d {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

struct Segment {
  Vec2 p0, p1;
  double reflectivity;
};

struct PointTarget {
  double range;
  double bearing;  // [0, 2pi)
  double reflectivity;
};

// Shapes of one frame expressed in the sensor frame.
struct FrameGeometry {
  std::vector<Segment> segments;
  std::vector<PointTarget> points;
};

Vec2 to_sensor(const RigidMotion2D& object_in_sensor, Vec2 local) {
  const double c = std::cos(object_in_sensor.theta);
  const double s = std::sin(object_in_sensor.theta);
  return {object_in_sensor.dx + c * local.x - s * local.y,
          object_in_sensor.dy + s * local.x + c * local.y};
}

void add_object(FrameGeometry& geo, const SceneObject& obj, const Pose2D& sensor) {
  const RigidMotion2D rel = relative_motion(sensor, obj.pose);
  std::visit(
      [&](const auto& shape) {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, PointShape>) {
          double bearing = std::atan2(rel.dy, rel.dx);
          if (bearing < 0.0) bearing += kTwoPi;
          geo.points.push_back({std::hypot(rel.dx, rel.dy), bearing, obj.reflectivity});
        } else if constexpr (std::is_same_v<T, WallShape>) {
          const double h = shape.length / 2.0;
          geo.segments.push_back({to_sensor(rel, {-h, 0.0}), to_sensor(rel, {h, 0.0}),
                                  obj.reflectivity});
        } else {
          const double hl = shape.length / 2.0;
          const double hw = shape.width / 2.0;
          const Vec2 corners[4] = {to_sensor(rel, {-hl, -hw}), to_sensor(rel, {hl, -hw}),
                                   to_sensor(rel, {hl, hw}), to_sensor(rel, {-hl, hw})};
          for (int i = 0; i < 4; ++i) {
            geo.segments.push_back({corners[i], corners[(i + 1) % 4], obj.reflectivity});
          }
        }
      },
      obj.shape);
}

// Range along direction d to the segment, or infinity.
double ray_hit(Vec2 d, const Segment& seg) {
  const Vec2 e{seg.p1.x - seg.p0.x, seg.p1.y - seg.p0.y};
  const double denom = cross(d, e);
  if (std::abs(denom) < 1e-12) return std::numeric_limits<double>::infinity();
  const double t = cross(seg.p0, e) / denom;
  const double u = cross(seg.p0, d) / denom;
  if (t <= 0.0 || u < 0.0 || u > 1.0) return std::numeric_limits<double>::infinity();
  return t;
}

void splat_range(std::span<float> row, double range, double amplitude,
                 const SensorSpec& sensor) {
  const double sigma = sensor.range_spread;
  const double res = sensor.range_resolution;
  const auto bins = static_cast<long>(row.size());
  const long lo = std::max(0L, static_cast<long>(std::floor((range - 3 * sigma) / res)));
  const long hi = std::min(bins - 1, static_cast<long>(std::ceil((range + 3 * sigma) / res)));
  for (long i = lo; i <= hi; ++i) {
    const double z = (i * res - range) / sigma;
    row[i] = static_cast<float>(row[i] + amplitude * std::exp(-0.5 * z * z));
  }
}

PolarScan render(const FrameGeometry& geo, const SensorSpec& sensor, double timestamp) {
  const std::size_t na = sensor.azimuth_count;
  const auto nr =
      static_cast<std::size_t>(std::floor(sensor.max_range / sensor.range_resolution)) + 1;
  PolarScan scan;
  scan.azimuths = uniform_azimuths(na);
  scan.intensities = Matrix<float>(na, nr, 0.0f);
  scan.range_resolution = sensor.range_resolution;
  scan.timestamp = timestamp;

  std::vector<double> occlusion(na, std::numeric_limits<double>::infinity());
  for (std::size_t a = 0; a < na; ++a) {
    const Vec2 d{std::cos(scan.azimuths[a]), std::sin(scan.azimuths[a])};
    double nearest = std::numeric_limits<double>::infinity();
    double reflectivity = 0.0;
    for (const Segment& seg : geo.segments) {
      const double t = ray_hit(d, seg);
      if (t < nearest) {
        nearest = t;
        reflectivity = seg.reflectivity;
      }
    }
    occlusion[a] = nearest;
    if (nearest <= sensor.max_range) {
      splat_range(scan.intensities.row(a), nearest, reflectivity, sensor);
    }
  }

  const double step = kTwoPi / static_cast<double>(na);
  const double beam_sigma = sensor.beam_spread * step;
  for (const PointTarget& p : geo.points) {
    if (p.range > sensor.max_range) continue;
    const auto reach = static_cast<long>(std::ceil(3.0 * beam_sigma / step));
    const auto center = static_cast<long>(std::lround(p.bearing / step));
    for (long k = center - reach; k <= center + reach; ++k) {
      const auto a = static_cast<std::size_t>(((k % static_cast<long>(na)) + na) % na);
      double delta = std::remainder(scan.azimuths[a] - p.bearing, kTwoPi);
      const double weight = std::exp(-0.5 * (delta / beam_sigma) * (delta / beam_sigma));
      if (weight < 1e-3 || p.range > occlusion[a]) continue;
      splat_range(scan.intensities.row(a), p.range, p.reflectivity * weight, sensor);
    }
  }

  for (float& v : scan.intensities.values()) v = std::min(v, 1.0f);
  return scan;
}

std::size_t inject_noise(PolarScan& scan, const NoiseSpec& noise, std::uint64_t seed,
                         std::size_t frame) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(frame), 0x5eedu};
  std::mt19937_64 rng(seq);
  auto values = scan.intensities.values();

  if (noise.intensity_sigma > 0.0) {
    std::normal_distribution<double> gauss(0.0, noise.intensity_sigma);
    for (float& v : values) {
      v = static_cast<float>(std::clamp(v + gauss(rng), 0.0, 1.0));
    }
  }

  std::uniform_int_distribution<std::size_t> pick_row(0, scan.azimuth_count() - 1);
  std::uniform_real_distribution<double> ghost_level(0.5, 1.0);
  for (int g = 0; g < noise.ghost_beam_count; ++g) {
    auto row = scan.intensities.row(pick_row(rng));
    const auto level = static_cast<float>(ghost_level(rng));
    for (float& v : row) v = std::max(v, level);
  }

  std::size_t corrupted = 0;
  if (noise.salt_pepper_density > 0.0) {
    std::bernoulli_distribution hit(noise.salt_pepper_density);
    std::bernoulli_distribution salt(0.5);
    for (float& v : values) {
      if (hit(rng)) {
        v = salt(rng) ? 1.0f : 0.0f;
        ++corrupted;
      }
    }
  }
  return corrupted;
}

}  // namespace

void SceneSpec::validate() const {
  if (!(noise.salt_pepper_density >= 0.0 && noise.salt_pepper_density <= 1.0)) {
    throw InputError("noise.salt_pepper must lie in [0, 1]");
  }
  if (noise.ghost_beam_count < 0) throw InputError("noise.ghost_beams must be >= 0");
  if (!(noise.intensity_sigma >= 0.0)) throw InputError("noise.sigma must be >= 0");
  if (!(sensor.max_range > 0.0)) throw InputError("sensor.max_range must be positive");
  if (sensor.azimuth_count < 2 || sensor.azimuth_count > 0xFFFF) {
    throw InputError("sensor.azimuth_count must lie in [2, 65535]");
  }
  if (!(sensor.range_resolution > 0.0)) {
    throw InputError("sensor.range_resolution must be positive");
  }
  if (!(sensor.range_spread > 0.0)) throw InputError("sensor.range_spread must be positive");
  if (!(sensor.beam_spread > 0.0)) throw InputError("sensor.beam_spread must be positive");
  if (!(sensor.scan_period > 0.0)) throw InputError("sensor.scan_period must be positive");
  auto check = [](const SceneObject& o, const char* kind) {
    if (!(o.reflectivity >= 0.0)) {
      throw InputError(std::string(kind) + ": reflectivity must be >= 0");
    }
  };
  for (const auto& o : static_targets) check(o, "static");
  for (const auto& o : moving_objects) check(o, "moving");
}

std::vector<PolarScan> SynthOutput::scans() const {
  std::vector<PolarScan> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(f.scan);
  return out;
}

std::vector<GroundTruthRecord> SynthOutput::ground_truth() const {
  std::vector<GroundTruthRecord> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back({f.sensor_pose.timestamp, f.sensor_pose});
  return out;
}

SynthOutput synth_scene(const SceneSpec& spec, std::size_t frame_count) {
  spec.validate();
  if (frame_count < 1) throw InputError("frame_count must be >= 1");

  SynthOutput out;
  auto warn_if_out_of_range = [&](const SceneObject& o, const char* kind, std::size_t i) {
    const double d = std::hypot(o.pose.x - spec.sensor_start.x, o.pose.y - spec.sensor_start.y);
    if (d > spec.sensor.max_range) {
      out.warnings.push_back(std::string(kind) + " object " + std::to_string(i) +
                             " starts outside max_range");
    }
  };
  for (std::size_t i = 0; i < spec.static_targets.size(); ++i) {
    warn_if_out_of_range(spec.static_targets[i], "static", i);
  }
  for (std::size_t i = 0; i < spec.moving_objects.size(); ++i) {
    warn_if_out_of_range(spec.moving_objects[i], "moving", i);
  }

  Pose2D sensor = spec.sensor_start;
  std::vector<SceneObject> moving = spec.moving_objects;
  out.object_poses.assign(moving.size(), {});

  for (std::size_t f = 0; f < frame_count; ++f) {
    const double t = static_cast<double>(f) * spec.sensor.scan_period;
    sensor.timestamp = t;

    FrameGeometry geo;
    for (const auto& o : spec.static_targets) add_object(geo, o, sensor);
    for (std::size_t i = 0; i < moving.size(); ++i) {
      add_object(geo, moving[i], sensor);
      Pose2D p = moving[i].pose;
      p.timestamp = t;
      out.object_poses[i].push_back(p);
    }

    SynthFrame frame{render(geo, spec.sensor, t), sensor, 0};
    frame.corrupted_bins = inject_noise(frame.scan, spec.noise, spec.seed, f);
    out.frames.push_back(std::move(frame));

    sensor = compose(sensor, spec.ego_motion_per_frame);
    for (auto& o : moving) o.pose = compose(o.pose, o.motion_per_frame);
  }
  return out;
}

namespace {

double to_double(const std::string& token, const std::string& key, std::size_t line) {
  double v;
  if (!detail::parse_number(token, v)) {
    throw InputError("scene spec line " + std::to_string(line) + ": field " + key +
                     ": bad number \"" + token + "\"");
  }
  return v;
}

// shape tokens: point x y refl | wall x y heading_deg length refl |
//               block x y heading_deg length width refl
SceneObject parse_object(const std::vector<std::string>& tok, std::size_t& pos,
                         const std::string& key, std::size_t line) {
  auto need = [&](std::size_t n) {
    if (pos + n > tok.size()) {
      throw InputError("scene spec line " + std::to_string(line) + ": field " + key +
                       ": too few values");
    }
  };
  auto num = [&]() { return to_double(tok[pos++], key, line); };
  need(1);
  const std::string kind = tok[pos++];
  SceneObject obj;
  if (kind == "point") {
    need(3);
    obj.shape = PointShape{};
    obj.pose.x = num();
    obj.pose.y = num();
  } else if (kind == "wall") {
    need(5);
    obj.pose.x = num();
    obj.pose.y = num();
    obj.pose.heading = normalize_angle(deg2rad(num()));
    obj.shape = WallShape{num()};
  } else if (kind == "block") {
    need(6);
    obj.pose.x = num();
    obj.pose.y = num();
    obj.pose.heading = normalize_angle(deg2rad(num()));
    const double length = num();
    const double width = num();
    obj.shape = BlockShape{length, width};
  } else {
    throw InputError("scene spec line " + std::to_string(line) + ": field " + key +
                     ": unknown shape \"" + kind + "\"");
  }
  obj.reflectivity = num();
  return obj;
}

}  // namespace

SceneSpec parse_scene_spec(std::istream& in) {
  SceneSpec spec;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = detail::trim(raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw InputError("scene spec line " + std::to_string(line) + ": expected key = value");
    }
    const std::string key = detail::trim(text.substr(0, eq));
    const std::vector<std::string> tok = detail::tokens(text.substr(eq + 1));
    auto scalar = [&]() {
      if (tok.size() != 1) {
        throw InputError("scene spec line " + std::to_string(line) + ": field " + key +
                         ": expected one value");
      }
      return to_double(tok[0], key, line);
    };
    auto triple = [&]() {
      if (tok.size() != 3) {
        throw InputError("scene spec line " + std::to_string(line) + ": field " + key +
                         ": expected three values");
      }
      return std::array<double, 3>{to_double(tok[0], key, line), to_double(tok[1], key, line),
                                   to_double(tok[2], key, line)};
    };
    auto count = [&](double v) {
      if (v < 0 || v != std::floor(v)) {
        throw InputError("scene spec line " + std::to_string(line) + ": field " + key +
                         ": expected a non-negative integer");
      }
      return v;
    };

    if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(count(scalar()));
    } else if (key == "sensor.max_range") {
      spec.sensor.max_range = scalar();
    } else if (key == "sensor.azimuth_count") {
      spec.sensor.azimuth_count = static_cast<std::size_t>(count(scalar()));
    } else if (key == "sensor.range_resolution") {
      spec.sensor.range_resolution = scalar();
    } else if (key == "sensor.range_spread") {
      spec.sensor.range_spread = scalar();
    } else if (key == "sensor.beam_spread") {
      spec.sensor.beam_spread = scalar();
    } else if (key == "sensor.scan_period") {
      spec.sensor.scan_period = scalar();
    } else if (key == "sensor.start") {
      const auto v = triple();
      spec.sensor_start = {v[0], v[1], normalize_angle(deg2rad(v[2])), 0.0};
    } else if (key == "ego.motion") {
      const auto v = triple();
      spec.ego_motion_per_frame = make_motion(v[0], v[1], deg2rad(v[2]));
    } else if (key == "noise.salt_pepper") {
      spec.noise.salt_pepper_density = scalar();
    } else if (key == "noise.ghost_beams") {
      spec.noise.ghost_beam_count = static_cast<int>(count(scalar()));
    } else if (key == "noise.sigma") {
      spec.noise.intensity_sigma = scalar();
    } else if (key == "static") {
      std::size_t pos = 0;
      SceneObject obj = parse_object(tok, pos, key, line);
      if (pos != tok.size()) {
        throw InputError("scene spec line " + std::to_string(line) + ": field " + key +
                         ": unexpected trailing values");
      }
      spec.static_targets.push_back(obj);
    } else if (key == "moving") {
      std::size_t pos = 0;
      SceneObject obj = parse_object(tok, pos, key, line);
      if (pos + 4 != tok.size() || tok[pos] != "motion") {
        throw InputError("scene spec line " + std::to_string(line) + ": field " + key +
                         ": expected \"motion dx dy dtheta_deg\" after the shape");
      }
      obj.motion_per_frame = make_motion(to_double(tok[pos + 1], key, line),
                                         to_double(tok[pos + 2], key, line),
                                         deg2rad(to_double(tok[pos + 3], key, line)));
      spec.moving_objects.push_back(obj);
    } else {
      throw InputError("scene spec line " + std::to_string(line) + ": unknown field " + key);
    }
  }
  spec.validate();
  return spec;
}

SceneSpec load_scene_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return parse_scene_spec(in);
}

}  // namespace fs2d
