#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fs2d/dataset.hpp"
#include "fs2d/odometry.hpp"
#include "fs2d/registration.hpp"

namespace fs2d {

struct PairError {
  double rotation_deg = 0.0;   // [0, 180]
  double translation_m = 0.0;
};

/// Rotation error |normalize(est - truth)| in degrees and Euclidean
/// translation error in the frame of the first scan.
PairError pair_errors(const RigidMotion2D& estimate, const RigidMotion2D& truth);

enum class OutlierRule {
  kConfidenceFlag,   // pairs flagged by the registration confidence test
  kErrorThreshold,   // pairs whose rotation error exceeds a threshold
};

struct EvalConfig {
  OutlierRule outlier_rule = OutlierRule::kConfidenceFlag;
  double error_threshold_deg = 5.0;
  /// Averages skip outliers when set.
  bool exclude_outliers = true;
  // Echoed into the report.
  int stride = 5;
  double cell_size = 0.75;
  double tau = 1.5;
};

struct PairEstimate {
  RigidMotion2D motion;
  bool flagged = false;
};

struct PairErrorRecord {
  double rotation_deg = 0.0;
  double translation_m = 0.0;
  bool flagged = false;   // confidence flag from registration
  bool outlier = false;   // per the configured outlier rule
};

struct EvaluationReport {
  std::size_t pair_count = 0;
  std::size_t included_count = 0;
  double avg_rotation_error_deg = 0.0;
  double rotation_outlier_fraction = 0.0;
  double avg_translation_error_m = 0.0;
  std::vector<PairErrorRecord> records;
  EvalConfig config;
  /// Mean error of integer-cell translation against uniform sub-cell offsets.
  double discretization_expected_mean_m = 0.0;
  /// Half-diagonal of a cell, the largest rounding error of a single pair.
  double discretization_half_diagonal_m = 0.0;
};

EvaluationReport evaluate(const std::vector<PairEstimate>& estimates,
                          const std::vector<RigidMotion2D>& truths,
                          const EvalConfig& cfg = {});
EvaluationReport evaluate(const std::vector<RegistrationResult>& results,
                          const std::vector<RigidMotion2D>& truths,
                          const EvalConfig& cfg = {});

/// Sum in a fixed pairwise tree over index order.
double pairwise_sum(std::span<const double> values);

/// Mean of |(U1, U2)| * cell for U ~ Uniform(-1/2, 1/2), estimated with a
/// fixed-seed Monte-Carlo run.
double monte_carlo_discretization_error(double cell_size, std::size_t samples = 200000,
                                        std::uint64_t seed = 1);

/// Ground-truth pose at time t: exact record, or linear interpolation when
/// the nearest record is less than one scan period away. Throws InputError
/// otherwise.
Pose2D pose_at(const std::vector<GroundTruthRecord>& records, double t,
               double scan_period);
RigidMotion2D truth_motion(const std::vector<GroundTruthRecord>& records, double ta,
                           double tb, double scan_period);

enum class TrajectoryFormat { kCsv, kGeoJson };

/// CSV columns timestamp,x,y,heading,outlier (0/1).
void export_trajectory(const Trajectory& traj, const std::filesystem::path& path,
                       TrajectoryFormat format = TrajectoryFormat::kCsv);
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);
std::string trajectory_geojson(const Trajectory& traj);
Trajectory parse_trajectory_csv(std::istream& in);
Trajectory import_trajectory(const std::filesystem::path& path);

std::string report_json(const EvaluationReport& report);
std::string report_table(const EvaluationReport& report);

/// Compares an estimated trajectory with ground truth: consecutive poses
/// form the estimated pairs, truth motions come from pose_at, and the
/// trajectory's outlier column supplies the flags.
EvaluationReport evaluate_trajectory(const Trajectory& estimate,
                                     const std::vector<GroundTruthRecord>& truth,
                                     double scan_period, const EvalConfig& cfg = {});

}  // namespace fs2d
