#include "fs2d/registration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fs2d/errors.hpp"

namespace fs2d {
namespace {

int wrap(int i, int n) { return ((i % n) + n) % n; }

// Marks every cell within Chebyshev distance `radius` of (row, col), cyclically.
void suppress(std::vector<char>& mask, int n, int row, int col, int radius) {
  const int span = std::min(radius, (n - 1) / 2);
  for (int dr = -span; dr <= span; ++dr) {
    for (int dc = -span; dc <= span; ++dc) {
      mask[static_cast<std::size_t>(wrap(row + dr, n)) * n + wrap(col + dc, n)] = 1;
    }
  }
}

// Row-major argmax over unmasked cells; -1 when everything is masked.
long masked_argmax(const Matrix<double>& v, const std::vector<char>& mask) {
  long best = -1;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!mask[i] && v.values()[i] > best_value) {
      best_value = v.values()[i];
      best = static_cast<long>(i);
    }
  }
  return best;
}

RigidMotion2D motion_from_peak(const CorrelationSurface& surface, Shift shift,
                               double theta, double cell_size, bool refine) {
  double dx = shift.dx;
  double dy = shift.dy;
  if (refine) {
    const SubcellShift sub = refine_subcell(surface, shift);
    dx = sub.dx;
    dy = sub.dy;
  }
  return make_motion(dx * cell_size, dy * cell_size, theta);
}

}  // namespace

void RegistrationConfig::validate() const {
  grid.validate();
  if (rotation.bandwidth < 16) throw InputError("bandwidth must be >= 16");
  if (rotation.alternatives < 0) throw InputError("rotation_alternatives must be >= 0");
  if (rotation.oversample < 1) throw InputError("rotation_oversample must be >= 1");
  if (!(outlier_threshold >= 1.0)) throw InputError("tau must be >= 1");
  if (nms_k < 1) throw InputError("nms_k must be >= 1");
  if (nms_radius < 1) throw InputError("nms_radius must be >= 1");
  if (!(rel_threshold > 0.0 && rel_threshold <= 1.0)) {
    throw InputError("rel_threshold must lie in (0, 1]");
  }
  if (!(correlation.relative_eps > 0.0)) {
    throw InputError("relative_eps must be positive");
  }
}

std::vector<Peak> extract_peaks(const CorrelationSurface& surface, int k,
                                int nms_radius, double rel_threshold) {
  if (k < 1 || nms_radius < 1 || !(rel_threshold > 0.0 && rel_threshold <= 1.0)) {
    throw InputError("extract_peaks: invalid parameters");
  }
  const int n = surface.size();
  std::vector<char> mask(surface.values.size(), 0);
  std::vector<Peak> peaks;
  while (static_cast<int>(peaks.size()) < k) {
    const long idx = masked_argmax(surface.values, mask);
    if (idx < 0) break;
    const double value = surface.values.values()[idx];
    if (!(value > 0.0)) break;
    if (!peaks.empty() && value < rel_threshold * peaks.front().strength) break;
    const int row = static_cast<int>(idx / n);
    const int col = static_cast<int>(idx % n);
    peaks.push_back({surface.shift_of(row, col), value});
    suppress(mask, n, row, col, nms_radius);
  }
  return peaks;
}

double confidence_score(const CorrelationSurface& surface, int nms_radius) {
  const int n = surface.size();
  if (n == 0) return 1.0;
  std::vector<char> mask(surface.values.size(), 0);
  const long top = masked_argmax(surface.values, mask);
  const double first = surface.values.values()[top];
  if (!(first > 0.0)) return 1.0;
  suppress(mask, n, static_cast<int>(top / n), static_cast<int>(top % n),
           nms_radius);
  const long runner = masked_argmax(surface.values, mask);
  if (runner < 0) return kMaxConfidence;
  const double second = surface.values.values()[runner];
  if (second <= first / kMaxConfidence) return kMaxConfidence;
  return std::max(1.0, first / second);
}

SubcellShift refine_subcell(const CorrelationSurface& surface, Shift peak) {
  const int n = surface.size();
  const int row = wrap(peak.dy, n);
  const int col = wrap(peak.dx, n);
  const auto& v = surface.values;
  const double c = v(row, col);
  const double ox = parabolic_offset(v(row, wrap(col - 1, n)), c, v(row, wrap(col + 1, n)));
  const double oy = parabolic_offset(v(wrap(row - 1, n), col), c, v(wrap(row + 1, n), col));
  return {peak.dx + ox, peak.dy + oy};
}

void check_same_geometry(const PolarScan& a, const PolarScan& b) {
  if (a.azimuth_count() != b.azimuth_count() ||
      a.range_bin_count() != b.range_bin_count()) {
    throw GeometryError("scans differ in azimuth or range bin count");
  }
  if (std::abs(a.range_resolution - b.range_resolution) >
      1e-9 * a.range_resolution) {
    throw GeometryError("scans differ in range resolution");
  }
  for (std::size_t i = 0; i < a.azimuths.size(); ++i) {
    if (std::abs(a.azimuths[i] - b.azimuths[i]) > 1e-6) {
      throw GeometryError("scans differ in azimuth angles at index " +
                          std::to_string(i));
    }
  }
}

RegistrationResult register_grids(const CartesianGrid& a, const CartesianGrid& b,
                                  const RegistrationConfig& cfg) {
  cfg.validate();
  if (a.size() != b.size() || std::abs(a.cell_size - b.cell_size) > 1e-12) {
    throw GeometryError("register: grids differ in size or cell size");
  }
  const ComplexSpectrum spec_a = dft2(a);
  const ComplexSpectrum spec_b = dft2(b);

  RegistrationResult result;
  // B looks like A rotated by the estimate, so the motion of B relative to A
  // turns the other way.
  result.rotation =
      estimate_rotation(magnitude(spec_a), magnitude(spec_b), cfg.rotation);
  result.rotation_confidence = result.rotation.confidence;

  double best_peak = -std::numeric_limits<double>::infinity();
  double theta = 0.0;
  // Each profile maximum leaves a pi ambiguity; the translation peak decides.
  std::vector<double> candidates(result.rotation.candidates.begin(),
                                 result.rotation.candidates.end());
  for (double alt : result.rotation.alternatives) {
    candidates.push_back(normalize_angle(alt));
    candidates.push_back(normalize_angle(alt + std::numbers::pi));
  }
  for (double candidate : candidates) {
    const double heading = normalize_angle(-candidate);
    const CartesianGrid aligned = rotate_grid(b, heading);
    CorrelationSurface surface =
        phase_correlate(dft2(aligned), spec_a, cfg.correlation);
    const double peak = surface.at(surface.argmax());
    if (peak > best_peak) {
      best_peak = peak;
      theta = heading;
      result.surface = std::move(surface);
    }
  }

  const CorrelationSurface& surface = result.surface;
  const Shift top = surface.argmax();
  const bool refine = cfg.subcell_refine;
  for (const Peak& p :
       extract_peaks(surface, cfg.nms_k, cfg.nms_radius, cfg.rel_threshold)) {
    result.hypotheses.push_back(
        {motion_from_peak(surface, p.shift, theta, a.cell_size, refine), p.strength,
         static_cast<int>(result.hypotheses.size()) + 1});
  }
  if (result.hypotheses.empty()) {
    // Non-positive surface: keep the argmax so the ego-motion is defined.
    result.hypotheses.push_back(
        {motion_from_peak(surface, top, theta, a.cell_size, refine),
         surface.at(top), 1});
  }
  result.ego_motion = result.hypotheses.front().motion;
  result.confidence = confidence_score(surface, cfg.nms_radius);
  result.is_outlier = result.confidence < cfg.outlier_threshold;
  return result;
}

RegistrationResult register_scans(const PolarScan& a, const PolarScan& b,
                                  const RegistrationConfig& cfg) {
  cfg.validate();
  check_same_geometry(a, b);
  auto grid = [&cfg](const PolarScan& s) {
    return preprocess(polar_to_cartesian(cfg.grid.despeckle ? despeckle(s) : s, cfg.grid),
                      cfg.grid);
  };
  const CartesianGrid ga = grid(a);
  const CartesianGrid gb = grid(b);
  return register_grids(ga, gb, cfg);
}

}  // namespace fs2d
