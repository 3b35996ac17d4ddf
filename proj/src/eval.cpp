#include "fs2d/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "json.hpp"

#include "fs2d/errors.hpp"
#include "text_util.hpp"

namespace fs2d {

PairError pair_errors(const RigidMotion2D& estimate, const RigidMotion2D& truth) {
  return {std::abs(rad2deg(normalize_angle(estimate.theta - truth.theta))),
          std::hypot(estimate.dx - truth.dx, estimate.dy - truth.dy)};
}

double pairwise_sum(std::span<const double> values) {
  if (values.empty()) return 0.0;
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double monte_carlo_discretization_error(double cell_size, std::size_t samples,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<double> errors(samples);
  for (double& e : errors) {
    const double a = u(rng);
    const double b = u(rng);
    e = std::hypot(a, b) * cell_size;
  }
  return pairwise_sum(errors) / static_cast<double>(samples);
}

EvaluationReport evaluate(const std::vector<PairEstimate>& estimates,
                          const std::vector<RigidMotion2D>& truths,
                          const EvalConfig& cfg) {
  if (estimates.size() != truths.size()) {
    throw InputError("evaluate: " + std::to_string(estimates.size()) + " estimates vs " +
                     std::to_string(truths.size()) + " truths");
  }
  EvaluationReport report;
  report.config = cfg;
  report.pair_count = estimates.size();
  report.discretization_expected_mean_m = monte_carlo_discretization_error(cfg.cell_size);
  report.discretization_half_diagonal_m = std::sqrt(2.0) / 2.0 * cfg.cell_size;

  std::vector<double> rot;
  std::vector<double> trans;
  std::size_t outliers = 0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const PairError e = pair_errors(estimates[i].motion, truths[i]);
    PairErrorRecord rec{e.rotation_deg, e.translation_m, estimates[i].flagged, false};
    rec.outlier = cfg.outlier_rule == OutlierRule::kConfidenceFlag
                      ? rec.flagged
                      : rec.rotation_deg > cfg.error_threshold_deg;
    if (rec.outlier) ++outliers;
    if (!(rec.outlier && cfg.exclude_outliers)) {
      rot.push_back(rec.rotation_deg);
      trans.push_back(rec.translation_m);
    }
    report.records.push_back(rec);
  }
  report.included_count = rot.size();
  if (!rot.empty()) {
    report.avg_rotation_error_deg = pairwise_sum(rot) / static_cast<double>(rot.size());
    report.avg_translation_error_m = pairwise_sum(trans) / static_cast<double>(trans.size());
  }
  if (report.pair_count > 0) {
    report.rotation_outlier_fraction =
        static_cast<double>(outliers) / static_cast<double>(report.pair_count);
  }
  return report;
}

EvaluationReport evaluate(const std::vector<RegistrationResult>& results,
                          const std::vector<RigidMotion2D>& truths,
                          const EvalConfig& cfg) {
  std::vector<PairEstimate> estimates;
  estimates.reserve(results.size());
  for (const auto& r : results) estimates.push_back({r.ego_motion, r.is_outlier});
  return evaluate(estimates, truths, cfg);
}

Pose2D pose_at(const std::vector<GroundTruthRecord>& records, double t,
               double scan_period) {
  if (records.empty()) throw InputError("ground truth is empty");
  const auto it = std::lower_bound(
      records.begin(), records.end(), t,
      [](const GroundTruthRecord& r, double value) { return r.timestamp < value; });
  constexpr double kSameTime = 1e-9;
  if (it != records.end() && std::abs(it->timestamp - t) <= kSameTime) {
    Pose2D p = it->pose;
    p.timestamp = t;
    return p;
  }
  if (it != records.begin() && std::abs(std::prev(it)->timestamp - t) <= kSameTime) {
    Pose2D p = std::prev(it)->pose;
    p.timestamp = t;
    return p;
  }
  if (it == records.begin() || it == records.end()) {
    throw InputError("no ground truth around timestamp " + format_double(t));
  }
  const GroundTruthRecord& lo = *std::prev(it);
  const GroundTruthRecord& hi = *it;
  if (std::min(t - lo.timestamp, hi.timestamp - t) >= scan_period) {
    throw InputError("nearest ground truth to timestamp " + format_double(t) +
                     " is more than one scan period away");
  }
  const double w = (t - lo.timestamp) / (hi.timestamp - lo.timestamp);
  return {lo.pose.x + w * (hi.pose.x - lo.pose.x), lo.pose.y + w * (hi.pose.y - lo.pose.y),
          normalize_angle(lo.pose.heading +
                          w * normalize_angle(hi.pose.heading - lo.pose.heading)),
          t};
}

RigidMotion2D truth_motion(const std::vector<GroundTruthRecord>& records, double ta,
                           double tb, double scan_period) {
  return relative_motion(pose_at(records, ta, scan_period), pose_at(records, tb, scan_period));
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  traj.validate();
  out << "timestamp,x,y,heading,outlier\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const Pose2D& p = traj.poses[i];
    out << format_double(p.timestamp) << ',' << format_double(p.x) << ','
        << format_double(p.y) << ',' << format_double(p.heading) << ','
        << (traj.outliers[i] ? 1 : 0) << '\n';
  }
}

std::string trajectory_geojson(const Trajectory& traj) {
  traj.validate();
  nlohmann::ordered_json coords = nlohmann::ordered_json::array();
  nlohmann::ordered_json stamps = nlohmann::ordered_json::array();
  nlohmann::ordered_json headings = nlohmann::ordered_json::array();
  nlohmann::ordered_json flags = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    coords.push_back({traj.poses[i].x, traj.poses[i].y});
    stamps.push_back(traj.poses[i].timestamp);
    headings.push_back(traj.poses[i].heading);
    flags.push_back(traj.outliers[i] ? 1 : 0);
  }
  nlohmann::ordered_json doc;
  doc["type"] = "FeatureCollection";
  doc["crs"] = "planar-meters";
  nlohmann::ordered_json feature;
  feature["type"] = "Feature";
  feature["geometry"] = {{"type", "LineString"}, {"coordinates", coords}};
  feature["properties"] = {{"timestamps", stamps}, {"headings", headings}, {"outliers", flags}};
  doc["features"] = nlohmann::ordered_json::array({feature});
  return doc.dump(2) + "\n";
}

void export_trajectory(const Trajectory& traj, const std::filesystem::path& path,
                       TrajectoryFormat format) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  if (format == TrajectoryFormat::kCsv) {
    write_trajectory_csv(traj, out);
  } else {
    out << trajectory_geojson(traj);
  }
  if (!out) throw Error("write failed: " + path.string());
}

Trajectory parse_trajectory_csv(std::istream& in) {
  Trajectory traj;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (traj.poses.empty() && line.rfind("timestamp", 0) == 0) continue;
    const auto fields = detail::split(line, ',');
    if (fields.size() != 5) {
      throw ParseError("trajectory line " + std::to_string(line_no) +
                           ": expected 5 fields, got " + std::to_string(fields.size()),
                       line_no);
    }
    double v[4];
    for (int i = 0; i < 4; ++i) {
      if (!detail::parse_number(fields[i], v[i])) {
        throw ParseError("trajectory line " + std::to_string(line_no) + ": bad number \"" +
                             fields[i] + "\"",
                         line_no);
      }
    }
    if (fields[4] != "0" && fields[4] != "1") {
      throw ParseError("trajectory line " + std::to_string(line_no) +
                           ": outlier flag must be 0 or 1",
                       line_no);
    }
    if (!traj.poses.empty() && !(v[0] > traj.poses.back().timestamp)) {
      throw ParseError("trajectory line " + std::to_string(line_no) +
                           ": timestamps not strictly increasing",
                       line_no);
    }
    traj.poses.push_back({v[1], v[2], v[3], v[0]});
    traj.outliers.push_back(fields[4] == "1");
  }
  return traj;
}

Trajectory import_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return parse_trajectory_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.location());
  }
}

EvaluationReport evaluate_trajectory(const Trajectory& estimate,
                                     const std::vector<GroundTruthRecord>& truth,
                                     double scan_period, const EvalConfig& cfg) {
  estimate.validate();
  std::vector<PairEstimate> est;
  std::vector<RigidMotion2D> gt;
  for (std::size_t i = 1; i < estimate.size(); ++i) {
    const Pose2D& a = estimate.poses[i - 1];
    const Pose2D& b = estimate.poses[i];
    est.push_back({relative_motion(a, b), estimate.outliers[i]});
    gt.push_back(truth_motion(truth, a.timestamp, b.timestamp, scan_period));
  }
  return evaluate(est, gt, cfg);
}

std::string report_json(const EvaluationReport& r) {
  nlohmann::ordered_json doc;
  doc["pair_count"] = r.pair_count;
  doc["included_count"] = r.included_count;
  doc["avg_rotation_error_deg"] = r.avg_rotation_error_deg;
  doc["rotation_outlier_fraction"] = r.rotation_outlier_fraction;
  doc["avg_translation_error_m"] = r.avg_translation_error_m;
  doc["discretization"] = {
      {"expected_mean_error_m", r.discretization_expected_mean_m},
      {"half_diagonal_bound_m", r.discretization_half_diagonal_m}};
  doc["config"] = {
      {"stride", r.config.stride},
      {"cell_size", r.config.cell_size},
      {"tau", r.config.tau},
      {"outlier_rule", r.config.outlier_rule == OutlierRule::kConfidenceFlag
                           ? "confidence"
                           : "error_threshold"},
      {"error_threshold_deg", r.config.error_threshold_deg},
      {"exclude_outliers", r.config.exclude_outliers}};
  nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
  for (const auto& rec : r.records) {
    pairs.push_back({{"rotation_error_deg", rec.rotation_deg},
                     {"translation_error_m", rec.translation_m},
                     {"flagged", rec.flagged},
                     {"outlier", rec.outlier}});
  }
  doc["pairs"] = pairs;
  return doc.dump(2) + "\n";
}

std::string report_table(const EvaluationReport& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "pairs                          " << r.pair_count << "\n"
      << "pairs in averages              " << r.included_count << "\n"
      << "avg rotation error (deg)       " << r.avg_rotation_error_deg << "\n"
      << "rotation outlier fraction      " << r.rotation_outlier_fraction << "\n"
      << "avg translation error (m)      " << r.avg_translation_error_m << "\n"
      << "expected mean rounding error   " << r.discretization_expected_mean_m
      << " m  (uniform sub-cell offsets, integer-cell estimate)\n"
      << "half-diagonal rounding bound   " << r.discretization_half_diagonal_m
      << " m  (worst case per pair, not a mean)\n";
  return out.str();
}

}  // namespace fs2d
