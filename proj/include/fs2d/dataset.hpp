#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "fs2d/grid.hpp"
#include "fs2d/se2.hpp"

namespace fs2d {

// ---------------------------------------------------------------------------
// Native scan files.
//
// Little-endian, 64-byte header followed by the payload:
//   0   char[8]  magic "FS2DSCAN"
//   8   u16      format version (1)
//   10  u16      azimuth_count
//   12  u32      range_bin_count
//   16  f64      range_resolution (m)
//   24  f64      timestamp (s)
//   32  u8[32]   reserved, zero
//   64  f64[azimuth_count]                     azimuth angles (rad)
//   ..  f32[azimuth_count * range_bin_count]   intensities, row-major
// ---------------------------------------------------------------------------

inline constexpr std::uint16_t kScanFormatVersion = 1;
inline constexpr std::size_t kScanHeaderBytes = 64;

std::vector<std::uint8_t> encode_polar_scan(const PolarScan& scan);
PolarScan decode_polar_scan(const std::vector<std::uint8_t>& bytes);

void save_polar_scan(const PolarScan& scan, const std::filesystem::path& path);
PolarScan load_polar_scan(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Ground truth CSV: header "timestamp,x,y,heading", one pose per line.
// ---------------------------------------------------------------------------

struct GroundTruthRecord {
  double timestamp = 0.0;
  Pose2D pose;
};

std::vector<GroundTruthRecord> parse_ground_truth(std::istream& in);
std::vector<GroundTruthRecord> load_ground_truth(const std::filesystem::path& path);
void save_ground_truth(const std::vector<GroundTruthRecord>& records,
                       const std::filesystem::path& path);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

// ---------------------------------------------------------------------------
// Synthetic scenes.
// ---------------------------------------------------------------------------

/// Small reflector, visible across a Gaussian beam.
struct PointShape {};
/// Thin segment of the given length, centered on its pose, along local x.
struct WallShape {
  double length = 10.0;
};
/// Solid rectangle centered on its pose.
struct BlockShape {
  double length = 4.0;  // along local x
  double width = 2.0;   // along local y
};
using Shape = std::variant<PointShape, WallShape, BlockShape>;

struct SceneObject {
  Shape shape;
  Pose2D pose;  // world frame, timestamp unused
  double reflectivity = 1.0;
  /// Body-frame motion applied after every frame; identity for static targets.
  RigidMotion2D motion_per_frame;
};

struct SensorSpec {
  double max_range = 90.0;
  std::size_t azimuth_count = 400;
  double range_resolution = 0.25;
  /// Gaussian sigma of a return along range (m).
  double range_spread = 0.4;
  /// Gaussian sigma of the beam across azimuth, in azimuth steps.
  double beam_spread = 0.6;
  double scan_period = 0.25;  // seconds between frames
};

struct NoiseSpec {
  double salt_pepper_density = 0.0;
  int ghost_beam_count = 0;
  double intensity_sigma = 0.0;
};

struct SceneSpec {
  std::vector<SceneObject> static_targets;
  std::vector<SceneObject> moving_objects;
  NoiseSpec noise;
  SensorSpec sensor;
  Pose2D sensor_start;
  RigidMotion2D ego_motion_per_frame;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthFrame {
  PolarScan scan;
  Pose2D sensor_pose;
  std::size_t corrupted_bins = 0;  // salt-and-pepper hits
};

struct SynthOutput {
  std::vector<SynthFrame> frames;
  /// World pose of every moving object per frame: [object][frame].
  std::vector<std::vector<Pose2D>> object_poses;
  std::vector<std::string> warnings;

  std::vector<PolarScan> scans() const;
  std::vector<GroundTruthRecord> ground_truth() const;
};

/// Renders frame_count sweeps. Each azimuth ray returns the nearest surface
/// of each wall or block (opaque shapes hide what lies behind them); points
/// return across the beam. Noise is injected afterwards from the seed.
SynthOutput synth_scene(const SceneSpec& spec, std::size_t frame_count);

/// Parses the key-value scene description (see README for the schema).
/// Throws InputError naming the offending key or line.
SceneSpec parse_scene_spec(std::istream& in);
SceneSpec load_scene_spec(const std::filesystem::path& path);

}  // namespace fs2d
