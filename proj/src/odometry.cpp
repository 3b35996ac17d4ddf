#include "fs2d/odometry.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include "fs2d/errors.hpp"

namespace fs2d {

void Trajectory::validate() const {
  if (outliers.size() != poses.size()) {
    throw InputError("trajectory: outlier flags do not match pose count");
  }
  for (std::size_t i = 1; i < poses.size(); ++i) {
    if (!(poses[i].timestamp > poses[i - 1].timestamp)) {
      throw InputError("trajectory: timestamps not strictly increasing at pose " +
                       std::to_string(i));
    }
  }
}

ScanSource ScanSource::from_vector(std::vector<PolarScan> scans) {
  auto shared = std::make_shared<const std::vector<PolarScan>>(std::move(scans));
  return {shared->size(), [shared](std::size_t i) { return shared->at(i); }};
}

Trajectory chain_motions(const Pose2D& origin, const std::vector<RigidMotion2D>& motions,
                         const std::vector<double>& timestamps,
                         const std::vector<bool>& outliers) {
  if (timestamps.size() != motions.size() + 1 || outliers.size() != motions.size()) {
    throw InputError("chain_motions: need one timestamp per pose and one flag per motion");
  }
  Trajectory traj;
  Pose2D pose = origin;
  pose.timestamp = timestamps.front();
  traj.poses.push_back(pose);
  traj.outliers.push_back(false);
  for (std::size_t i = 0; i < motions.size(); ++i) {
    pose = compose(pose, motions[i]);
    pose.timestamp = timestamps[i + 1];
    traj.poses.push_back(pose);
    traj.outliers.push_back(outliers[i]);
  }
  return traj;
}

OdometryRun run_odometry(const ScanSource& source, const OdometryConfig& cfg) {
  if (cfg.stride < 1) throw InputError("stride must be >= 1");
  const auto stride = static_cast<std::size_t>(cfg.stride);
  if (source.count < stride + 1) {
    throw InputError("odometry needs at least stride + 1 = " + std::to_string(stride + 1) +
                     " scans, got " + std::to_string(source.count));
  }
  cfg.registration.validate();

  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  const std::size_t step = cfg.pair_mode == PairMode::kSliding ? 1 : stride;
  for (std::size_t i = 0; i + stride < source.count; i += step) jobs.emplace_back(i, i + stride);

  OdometryRun run;
  run.pairs.resize(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      try {
        const auto [ia, ib] = jobs[k];
        const PolarScan a = source.load(ia);
        const PolarScan b = source.load(ib);
        const auto start = std::chrono::steady_clock::now();
        RegistrationResult r = register_scans(a, b, cfg.registration);
        const auto stop = std::chrono::steady_clock::now();
        run.pairs[k] = {ia,           ib,           a.timestamp,        b.timestamp,
                        r.ego_motion, r.confidence, r.is_outlier,       std::move(r.hypotheses),
                        std::chrono::duration<double, std::milli>(stop - start).count()};
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(jobs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Report the first failure in input order, independent of scheduling.
  for (std::size_t k = 0; k < errors.size(); ++k) {
    if (!errors[k]) continue;
    const std::string where = "pair " + std::to_string(k) + " (scans " +
                              std::to_string(jobs[k].first) + ", " +
                              std::to_string(jobs[k].second) + "): ";
    try {
      std::rethrow_exception(errors[k]);
    } catch (const InputError& e) {
      throw InputError(where + e.what());
    } catch (const std::exception& e) {
      throw Error(where + "registration failed: " + e.what());
    }
  }

  std::vector<RigidMotion2D> motions;
  std::vector<double> timestamps;
  std::vector<bool> flags;
  RigidMotion2D held = RigidMotion2D::identity();
  for (const PairRecord& p : run.pairs) {
    if (p.index_a % stride != 0) continue;
    if (timestamps.empty()) timestamps.push_back(p.timestamp_a);
    RigidMotion2D m = p.motion;
    if (cfg.outlier_policy == OutlierPolicy::kHoldPreviousMotion) {
      if (p.is_outlier) {
        m = held;
      } else {
        held = m;
      }
    }
    motions.push_back(m);
    timestamps.push_back(p.timestamp_b);
    flags.push_back(p.is_outlier);
  }
  run.trajectory = chain_motions(cfg.origin, motions, timestamps, flags);
  return run;
}

}  // namespace fs2d
