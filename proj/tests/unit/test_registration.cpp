#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "fs2d/errors.hpp"
#include "fs2d/eval.hpp"
#include "fs2d/registration.hpp"
#include "../support/oracles.hpp"
#include "../support/scenes.hpp"

using namespace fs2d;

namespace {

CorrelationSurface impulses(int n, std::initializer_list<std::tuple<int, int, double>> cells) {
  CorrelationSurface s{Matrix<double>(n, n, 0.0)};
  for (const auto& [row, col, v] : cells) s.values(row, col) = v;
  return s;
}

// Band-limited surface peaked at a fractional shift: phase ramp of a
// Gaussian-tapered spectrum.
CorrelationSurface fractional_peak(int n, double dx, double dy) {
  ComplexSpectrum spec{Matrix<std::complex<double>>(n, n)};
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double ku = r - n / 2;
      const double kv = c - n / 2;
      const double taper = std::exp(-(ku * ku + kv * kv) / (2.0 * (n / 8.0) * (n / 8.0)));
      const double phase = -2.0 * std::numbers::pi * (ku * dy + kv * dx) / n;
      spec.values(r, c) = std::polar(taper, phase);
    }
  }
  return {idft2_real(spec)};
}

}  // namespace

TEST_CASE("extract_peaks examples") {
  const CorrelationSurface one = impulses(32, {{5, 7, 1.0}});
  const auto p1 = extract_peaks(one, 5, 3, 0.3);
  REQUIRE(p1.size() == 1);
  CHECK(p1[0].shift == Shift{7, 5});
  CHECK(p1[0].strength == 1.0);

  const CorrelationSurface two = impulses(32, {{5, 7, 1.0}, {20, 20, 0.7}});
  const auto p2 = extract_peaks(two, 5, 3, 0.5);
  REQUIRE(p2.size() == 2);
  CHECK(p2[0].shift == Shift{7, 5});
  CHECK(p2[1].shift == Shift{-12, -12});
  CHECK(p2[1].strength == 0.7);

  CHECK(extract_peaks(two, 1, 3, 0.5).size() == 1);
  CHECK(extract_peaks(two, 5, 3, 0.8).size() == 1);

  // Neighbors inside the suppression radius are skipped, also across the wrap.
  const CorrelationSurface wrapped = impulses(32, {{0, 0, 1.0}, {31, 1, 0.9}, {10, 10, 0.5}});
  const auto p3 = extract_peaks(wrapped, 5, 3, 0.3);
  REQUIRE(p3.size() == 2);
  CHECK(p3[1].shift == Shift{10, 10});

  CHECK_THROWS_AS(extract_peaks(one, 0, 3, 0.3), InputError);
  CHECK_THROWS_AS(extract_peaks(one, 1, 0, 0.3), InputError);
  CHECK_THROWS_AS(extract_peaks(one, 1, 3, 0.0), InputError);
  CHECK(extract_peaks(impulses(16, {}), 5, 3, 0.3).empty());
}

TEST_CASE("extract_peaks strengths are non-increasing") {
  std::mt19937_64 rng(41);
  const CorrelationSurface s{testing::random_matrix(64, rng)};
  const auto peaks = extract_peaks(s, 10, 2, 0.01);
  REQUIRE(peaks.size() == 10);
  for (std::size_t i = 1; i < peaks.size(); ++i) {
    CHECK(peaks[i].strength <= peaks[i - 1].strength);
    for (std::size_t j = 0; j < i; ++j) {
      const int ddx = std::abs(peaks[i].shift.dx - peaks[j].shift.dx) % 64;
      const int ddy = std::abs(peaks[i].shift.dy - peaks[j].shift.dy) % 64;
      CHECK(std::max(std::min(ddx, 64 - ddx), std::min(ddy, 64 - ddy)) > 2);
    }
  }
}

TEST_CASE("confidence_score examples") {
  CHECK(confidence_score(impulses(32, {{3, 3, 1.0}}), 3) == kMaxConfidence);
  CHECK(confidence_score(CorrelationSurface{Matrix<double>(32, 32, 0.4)}, 3) == 1.0);
  CHECK(confidence_score(CorrelationSurface{Matrix<double>(32, 32, 0.0)}, 3) == 1.0);
  CHECK(confidence_score(impulses(32, {{3, 3, 1.0}, {20, 20, 0.5}}), 3) == doctest::Approx(2.0));
  // A neighbor within the radius does not count as the runner-up.
  CHECK(confidence_score(impulses(32, {{3, 3, 1.0}, {4, 4, 0.9}, {20, 20, 0.25}}), 3) ==
        doctest::Approx(4.0));
}

TEST_CASE("refine_subcell") {
  CorrelationSurface s{Matrix<double>(16, 16, 0.0)};
  s.values(8, 7) = 0.5;
  s.values(8, 8) = 1.0;
  s.values(8, 9) = 0.9;
  s.values(7, 8) = 0.6;
  s.values(9, 8) = 0.6;
  const SubcellShift r = refine_subcell(s, s.shift_of(8, 8));
  CHECK(r.dx == doctest::Approx(-8.0 + 1.0 / 3.0));
  CHECK(r.dy == doctest::Approx(-8.0));

  for (double truth : {0.3, -0.3, 0.1, 0.45}) {
    const CorrelationSurface f = fractional_peak(64, truth, -truth / 2);
    const Shift top = f.argmax();
    const SubcellShift est = refine_subcell(f, top);
    CHECK(std::abs(est.dx - truth) < 0.1);
    CHECK(std::abs(est.dy + truth / 2) < 0.1);
  }
}

TEST_CASE("registration config validation") {
  RegistrationConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.outlier_threshold = 0.5;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = {};
  cfg.nms_k = 0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = {};
  cfg.rel_threshold = 1.5;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = {};
  cfg.rotation.bandwidth = 8;
  CHECK_THROWS_AS(cfg.validate(), InputError);
}

TEST_CASE("self-registration is the identity with high confidence") {
  const SynthOutput out = testing::render_pair(testing::random_scene(3), RigidMotion2D::identity());
  const RegistrationResult r = register_scans(out.frames[0].scan, out.frames[0].scan);
  CHECK(r.ego_motion.dx == 0.0);
  CHECK(r.ego_motion.dy == 0.0);
  CHECK(std::abs(r.ego_motion.theta) < 1e-9);
  CHECK(r.confidence > 5.0);
  CHECK_FALSE(r.is_outlier);
  REQUIRE_FALSE(r.hypotheses.empty());
  CHECK(r.hypotheses[0].motion == r.ego_motion);
  CHECK(r.hypotheses[0].rank == 1);
}

TEST_CASE("known motion is recovered") {
  const RigidMotion2D truth = make_motion(3.0, -1.5, deg2rad(10.0));
  const SynthOutput out = testing::render_pair(testing::random_scene(4), truth);
  const RegistrationResult r = register_scans(out.frames[0].scan, out.frames[1].scan);
  const PairError e = pair_errors(r.ego_motion, truth);
  CHECK(e.rotation_deg <= 0.5);
  CHECK(e.translation_m <= std::sqrt(2.0) / 2.0 * 0.75);
  CHECK(r.rotation_confidence >= 1.0);
  for (std::size_t i = 1; i < r.hypotheses.size(); ++i) {
    CHECK(r.hypotheses[i].strength <= r.hypotheses[i - 1].strength);
    CHECK(r.hypotheses[i].rank == static_cast<int>(i) + 1);
  }
}

TEST_CASE("scaled intensities give the same motion") {
  const RigidMotion2D truth = make_motion(-4.0, 2.0, deg2rad(-15.0));
  const SynthOutput out = testing::render_pair(testing::random_scene(5), truth);
  PolarScan scaled = out.frames[1].scan;
  for (float& v : scaled.intensities.values()) v *= 3.0f;
  const RegistrationResult a = register_scans(out.frames[0].scan, out.frames[1].scan);
  const RegistrationResult b = register_scans(out.frames[0].scan, scaled);
  CHECK(a.ego_motion.dx == b.ego_motion.dx);
  CHECK(a.ego_motion.dy == b.ego_motion.dy);
  CHECK(a.ego_motion.theta == doctest::Approx(b.ego_motion.theta).epsilon(1e-9));
}

TEST_CASE("forward and backward registrations are inverse") {
  const RigidMotion2D truth = make_motion(6.0, 4.0, deg2rad(25.0));
  const SynthOutput out = testing::render_pair(testing::random_scene(6), truth);
  const RegistrationResult ab = register_scans(out.frames[0].scan, out.frames[1].scan);
  const RegistrationResult ba = register_scans(out.frames[1].scan, out.frames[0].scan);
  const RigidMotion2D loop = compose(ab.ego_motion, ba.ego_motion);
  CHECK(std::hypot(loop.dx, loop.dy) <= 0.75 * 1.5);
  CHECK(std::abs(rad2deg(loop.theta)) <= 180.0 / 128);
}

TEST_CASE("two-body scene yields a second hypothesis") {
  const testing::TwoBodyScene scene = testing::two_body_scene(501);
  const SynthOutput out = synth_scene(scene.spec, 2);
  const RegistrationResult r = register_scans(out.frames[0].scan, out.frames[1].scan);
  REQUIRE(r.hypotheses.size() >= 2);
  const RigidMotion2D object = scene.object_hypothesis();
  CHECK(std::abs(r.hypotheses[0].motion.dx - scene.ego.dx) <= 0.75);
  CHECK(std::abs(r.hypotheses[0].motion.dy - scene.ego.dy) <= 0.75);
  CHECK(std::abs(r.hypotheses[1].motion.dx - object.dx) <= 0.75);
  CHECK(std::abs(r.hypotheses[1].motion.dy - object.dy) <= 0.75);
  CHECK(r.hypotheses[1].strength < r.hypotheses[0].strength);
}

TEST_CASE("geometry mismatch and flat scans") {
  const SynthOutput out = testing::render_pair(testing::random_scene(10), RigidMotion2D::identity());
  PolarScan other = out.frames[0].scan;
  other.range_resolution *= 2.0;
  CHECK_THROWS_AS(register_scans(out.frames[0].scan, other), GeometryError);

  PolarScan flat = out.frames[0].scan;
  flat.intensities.fill(0.0f);
  CHECK_THROWS_AS(register_scans(flat, flat), NoStructureError);
}
