#pragma once

#include <optional>
#include <vector>

#include "fs2d/grid.hpp"
#include "fs2d/rotation.hpp"
#include "fs2d/se2.hpp"
#include "fs2d/spectral.hpp"

namespace fs2d {

struct RegistrationConfig {
  GridConfig grid;
  RotationConfig rotation;
  PhaseCorrelationConfig correlation;
  double outlier_threshold = 1.5;  // tau, on the translation peak ratio
  int nms_k = 5;
  int nms_radius = 3;
  double rel_threshold = 0.3;
  bool subcell_refine = false;

  void validate() const;
};

/// One candidate rigid motion read from a translation correlation peak.
/// Rank 1 is the ego-motion; further ranks are structures that move
/// differently from the dominant background.
struct MotionHypothesis {
  RigidMotion2D motion;
  double strength = 0.0;
  int rank = 1;
};

struct RegistrationResult {
  RigidMotion2D ego_motion;
  double confidence = 1.0;
  bool is_outlier = false;
  std::vector<MotionHypothesis> hypotheses;
  double rotation_confidence = 1.0;
  RotationEstimate rotation;
  /// Translation surface of the winning rotation candidate.
  CorrelationSurface surface;
};

struct Peak {
  Shift shift;
  double strength = 0.0;
};

/// Greedy non-maximum suppression over a cyclic surface. Takes the global
/// maximum, suppresses its Chebyshev neighborhood of `nms_radius` cells,
/// repeats; stops after `k` peaks or once the next maximum drops below
/// rel_threshold times the first. Ties resolve to the lowest row-major index.
std::vector<Peak> extract_peaks(const CorrelationSurface& surface, int k,
                                int nms_radius, double rel_threshold);

/// Ratio of the strongest value to the strongest value outside its
/// nms_radius Chebyshev neighborhood. 1 for flat, zero or non-positive
/// surfaces; capped at kMaxConfidence when the runner-up is at or below the
/// numerical floor.
double confidence_score(const CorrelationSurface& surface, int nms_radius);
inline constexpr double kMaxConfidence = 1e6;

/// Sub-cell peak position from a separable three-point parabola fit per
/// axis. Neighbors wrap cyclically. Each offset is within [-0.5, 0.5].
struct SubcellShift {
  double dx = 0.0;
  double dy = 0.0;
};
SubcellShift refine_subcell(const CorrelationSurface& surface, Shift peak);

/// Full pairwise registration. Throws GeometryError for incompatible scans
/// and NoStructureError when the rotation stage finds nothing to align.
RegistrationResult register_scans(const PolarScan& a, const PolarScan& b,
                                  const RegistrationConfig& cfg = {});

/// Same pipeline on already preprocessed grids.
RegistrationResult register_grids(const CartesianGrid& a, const CartesianGrid& b,
                                  const RegistrationConfig& cfg = {});

/// Throws GeometryError unless both scans share azimuth and range layout.
void check_same_geometry(const PolarScan& a, const PolarScan& b);

}  // namespace fs2d
