#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "fs2d/registration.hpp"
#include "fs2d/se2.hpp"

namespace fs2d {

struct Trajectory {
  std::vector<Pose2D> poses;
  /// outliers[i] marks the registration that produced poses[i]; the origin
  /// is never flagged.
  std::vector<bool> outliers;

  std::size_t size() const { return poses.size(); }
  /// Throws InputError unless timestamps increase strictly and the flag
  /// vector matches.
  void validate() const;
};

/// Random-access scan provider. Scans are fetched on demand so a sequence
/// never has to sit in memory at once.
struct ScanSource {
  std::size_t count = 0;
  std::function<PolarScan(std::size_t)> load;

  static ScanSource from_vector(std::vector<PolarScan> scans);
};

enum class PairMode {
  kEveryStride,  // pairs (0, s), (s, 2s), ...
  kSliding,      // pairs (i, i + s) for every i
};

enum class OutlierPolicy {
  kKeep,                  // chain flagged motions as estimated
  kHoldPreviousMotion,    // replace a flagged motion with the last one kept
};

struct OdometryConfig {
  RegistrationConfig registration;
  int stride = 5;
  PairMode pair_mode = PairMode::kEveryStride;
  OutlierPolicy outlier_policy = OutlierPolicy::kKeep;
  Pose2D origin;
  int jobs = 1;
};

struct PairRecord {
  std::size_t index_a = 0;
  std::size_t index_b = 0;
  double timestamp_a = 0.0;
  double timestamp_b = 0.0;
  RigidMotion2D motion;
  double confidence = 1.0;
  bool is_outlier = false;
  std::vector<MotionHypothesis> hypotheses;
  double elapsed_ms = 0.0;
};

struct OdometryRun {
  Trajectory trajectory;
  /// Every registered pair, in input order.
  std::vector<PairRecord> pairs;
};

/// Folds body-frame motions onto the origin. Timestamps come from the
/// caller; outlier flags are copied.
Trajectory chain_motions(const Pose2D& origin, const std::vector<RigidMotion2D>& motions,
                         const std::vector<double>& timestamps,
                         const std::vector<bool>& outliers);

/// Registers scan pairs at the configured stride and chains the ego-motions.
/// The trajectory holds floor((N - 1) / stride) + 1 poses. In sliding mode
/// every (i, i + stride) pair is registered and reported, while the
/// trajectory chains the every-stride subset. A registration error aborts
/// with the failing pair index in the message.
OdometryRun run_odometry(const ScanSource& source, const OdometryConfig& cfg);

}  // namespace fs2d
