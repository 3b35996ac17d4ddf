#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "fs2d/errors.hpp"
#include "fs2d/rotation.hpp"
#include "../support/oracles.hpp"
#include "../support/scenes.hpp"

using namespace fs2d;

namespace {

constexpr double kPi = std::numbers::pi;

double mod_pi_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), kPi);
  return std::min(d, kPi - d);
}

SphericalCoefficients random_coefficients(int bw, int max_degree, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  SphericalCoefficients c(bw);
  for (int l = 0; l <= max_degree; ++l) {
    c(l, 0) = {g(rng), 0.0};
    for (int m = 1; m <= l; ++m) c(l, m) = {g(rng), g(rng)};
  }
  return c;
}

SpectralMagnitude scene_magnitude(const PolarScan& scan) {
  GridConfig cfg;
  return magnitude(dft2(preprocess(polar_to_cartesian(scan, cfg), cfg)));
}

}  // namespace

TEST_CASE("parabolic offset") {
  CHECK(parabolic_offset(0.5, 1.0, 0.9) == doctest::Approx(1.0 / 3.0));
  CHECK(parabolic_offset(0.9, 1.0, 0.5) == doctest::Approx(-1.0 / 3.0));
  CHECK(parabolic_offset(0.7, 1.0, 0.7) == 0.0);
  CHECK(parabolic_offset(1.0, 0.5, 1.0) == 0.0);
  // Brute-force vertex of the parabola through the three samples.
  const double l = 0.2, c = 0.9, r = 0.6;
  double best_x = 0.0, best_y = -1e300;
  for (int i = -5000; i <= 5000; ++i) {
    const double x = i / 10000.0;
    const double y = c + 0.5 * (r - l) * x + 0.5 * (r + l - 2 * c) * x * x;
    if (y > best_y) {
      best_y = y;
      best_x = x;
    }
  }
  CHECK(parabolic_offset(l, c, r) == doctest::Approx(best_x).epsilon(1e-3));
}

TEST_CASE("quadrature integrates low-degree polynomials") {
  const auto plan = SphericalTransformPlan::get(16);
  for (int p = 0; p < 31; ++p) {
    double sum = 0.0;
    for (int j = 0; j < 32; ++j) sum += plan->weight(j) * std::pow(std::cos(plan->colatitude(j)), p);
    const double exact = p % 2 == 0 ? 2.0 / (p + 1) : 0.0;
    CHECK(sum == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("constant function has only the degree-0 coefficient") {
  const int bw = 16;
  SphericalFunction f{bw, Matrix<double>(2 * bw, 2 * bw, 1.0)};
  const SphericalCoefficients c = sphere_transform(f);
  CHECK(c(0, 0).real() == doctest::Approx(std::sqrt(4 * kPi)));
  for (int l = 1; l < bw; ++l) {
    for (int m = 0; m <= l; ++m) CHECK(std::abs(c(l, m)) < 1e-12);
  }
  SphericalFunction zero{bw, Matrix<double>(2 * bw, 2 * bw, 0.0)};
  const SphericalCoefficients z = sphere_transform(zero);
  for (int l = 0; l < bw; ++l) {
    for (int m = 0; m <= l; ++m) CHECK(std::abs(z(l, m)) == 0.0);
  }
}

TEST_CASE("band-limited round trip") {
  std::mt19937_64 rng(31);
  for (int bw : {16, 32}) {
    const SphericalCoefficients c = random_coefficients(bw, bw / 2, rng);
    const SphericalFunction f = sphere_inverse(c);
    const SphericalCoefficients back = sphere_transform(f);
    double scale = 0.0;
    for (int l = 0; l < bw; ++l) {
      for (int m = 0; m <= l; ++m) scale = std::max(scale, std::abs(c(l, m)));
    }
    for (int l = 0; l < bw; ++l) {
      for (int m = 0; m <= l; ++m) CHECK(std::abs(back(l, m) - c(l, m)) < 1e-8 * scale);
    }
    const SphericalFunction again = sphere_inverse(back);
    for (std::size_t i = 0; i < f.samples.size(); ++i) {
      CHECK(std::abs(again.samples.values()[i] - f.samples.values()[i]) < 1e-8 * scale);
    }
  }
}

TEST_CASE("coefficient rotation moves samples along longitude") {
  std::mt19937_64 rng(32);
  const int bw = 16;
  const SphericalCoefficients c = random_coefficients(bw, bw - 1, rng);
  // A quarter turn is B/2 longitude samples.
  const SphericalFunction f = sphere_inverse(c);
  const SphericalFunction g = sphere_inverse(rotate_about_polar_axis(c, kPi / 2));
  for (int j = 0; j < 2 * bw; ++j) {
    for (int k = 0; k < 2 * bw; ++k) {
      CHECK(g.samples(j, (k + bw / 2) % (2 * bw)) == doctest::Approx(f.samples(j, k)).epsilon(1e-9));
    }
  }
}

TEST_CASE("so3_correlate examples") {
  std::mt19937_64 rng(33);
  const int bw = 32;
  const SphericalCoefficients f = random_coefficients(bw, bw - 1, rng);
  const std::vector<double> self = so3_correlate(f, f);
  REQUIRE(self.size() == 2u * bw);
  CHECK(std::max_element(self.begin(), self.end()) - self.begin() == 0);

  const std::vector<double> turned = so3_correlate(f, rotate_about_polar_axis(f, kPi / 4));
  const auto k = std::max_element(turned.begin(), turned.end()) - turned.begin();
  CHECK(std::abs(k * kPi / bw - kPi / 4) <= kPi / bw);

  const std::vector<double> zero = so3_correlate(SphericalCoefficients(bw), f);
  for (double v : zero) CHECK(v == 0.0);

  // Oversampling evaluates the same polynomial: every fourth sample matches.
  const std::vector<double> fine = so3_correlate(f, rotate_about_polar_axis(f, 0.3), 4);
  const std::vector<double> coarse = so3_correlate(f, rotate_about_polar_axis(f, 0.3), 1);
  REQUIRE(fine.size() == 4 * coarse.size());
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    CHECK(fine[4 * i] == doctest::Approx(coarse[i]).epsilon(1e-9));
  }

  CHECK_THROWS_AS(so3_correlate(f, SphericalCoefficients(16)), GeometryError);
}

TEST_CASE("projection examples") {
  const int n = 64;
  const int bw = 32;
  SpectralMagnitude zero{Matrix<double>(n, n, 0.0)};
  for (double v : project_to_sphere(zero, bw).samples.values()) CHECK(v == 0.0);

  SpectralMagnitude iso{Matrix<double>(n, n, 0.0)};
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double d2 = double((r - n / 2) * (r - n / 2) + (c - n / 2) * (c - n / 2));
      iso.values(r, c) = std::exp(-d2 / 400.0);
    }
  }
  const SphericalFunction f = project_to_sphere(iso, bw);
  for (int j = 0; j < 2 * bw; ++j) {
    for (int k = 1; k < 2 * bw; ++k) CHECK(std::abs(f.samples(j, k) - f.samples(j, 0)) < 1e-3);
  }

  CHECK_THROWS_AS(project_to_sphere(iso, 8), InputError);
  CHECK_THROWS_AS(project_to_sphere(iso, 200), InputError);
}

TEST_CASE("quarter-turned magnitude projects to a quarter-turned sphere") {
  std::mt19937_64 rng(34);
  const int n = 64;
  const int bw = 32;
  const SpectralMagnitude m = magnitude(dft2(testing::random_matrix(n, rng)));
  const SpectralMagnitude r{testing::rotate90(m.values)};
  const SphericalFunction f = project_to_sphere(m, bw);
  const SphericalFunction g = project_to_sphere(r, bw);
  double scale = 0.0;
  for (double v : f.samples.values()) scale = std::max(scale, v);
  for (int j = 0; j < 2 * bw; ++j) {
    for (int k = 0; k < 2 * bw; ++k) {
      CHECK(std::abs(g.samples(j, (k + bw / 2) % (2 * bw)) - f.samples(j, k)) <= 1e-6 * scale);
    }
  }
}

TEST_CASE("estimate_rotation on identical and quarter-turned inputs") {
  std::mt19937_64 rng(35);
  const int n = 64;
  RotationConfig cfg;
  cfg.bandwidth = 32;
  const SpectralMagnitude m = magnitude(dft2(testing::random_matrix(n, rng)));
  const RotationEstimate same = estimate_rotation(m, m, cfg);
  CHECK(same.angle_mod_pi == doctest::Approx(0.0));
  CHECK(same.candidates[0] == doctest::Approx(0.0));
  CHECK(same.candidates[1] == doctest::Approx(kPi));
  CHECK(same.confidence >= 1.0);

  const SpectralMagnitude r{testing::rotate90(m.values)};
  const RotationEstimate quarter = estimate_rotation(m, r, cfg);
  CHECK(std::abs(quarter.angle_mod_pi - kPi / 2) < 1e-6);
  CHECK(std::abs(std::abs(normalize_angle(quarter.candidates[0] - quarter.candidates[1])) - kPi) < 1e-12);

  // Swapping the inputs negates the angle mod pi.
  const RotationEstimate swapped = estimate_rotation(r, m, cfg);
  CHECK(mod_pi_distance(quarter.angle_mod_pi + swapped.angle_mod_pi, 0.0) < 1e-6);

  // Scaling a magnitude leaves the argmax alone.
  SpectralMagnitude scaled = r;
  for (double& v : scaled.values.values()) v *= 37.0;
  CHECK(estimate_rotation(m, scaled, cfg).angle_mod_pi == doctest::Approx(quarter.angle_mod_pi));
}

TEST_CASE("flat inputs raise NoStructureError") {
  SpectralMagnitude zero{Matrix<double>(64, 64, 0.0)};
  RotationConfig cfg;
  cfg.bandwidth = 32;
  CHECK_THROWS_AS(estimate_rotation(zero, zero, cfg), NoStructureError);
  CHECK_THROWS_AS(estimate_rotation_polar_oracle(zero, zero), NoStructureError);
  SpectralMagnitude other{Matrix<double>(32, 32, 1.0)};
  CHECK_THROWS_AS(estimate_rotation(zero, other, cfg), GeometryError);
}

TEST_CASE("synthetic scene rotated by 30 degrees") {
  const SceneSpec spec = testing::random_scene(7);
  // The second sensor turns by -30 degrees, so its view of the scene turns by +30.
  const SynthOutput out = testing::render_pair(spec, make_motion(0.0, 0.0, deg2rad(-30.0)));
  const SpectralMagnitude a = scene_magnitude(out.frames[0].scan);
  const SpectralMagnitude b = scene_magnitude(out.frames[1].scan);
  const RotationEstimate est = estimate_rotation(a, b);
  CHECK(rad2deg(mod_pi_distance(est.angle_mod_pi, deg2rad(30.0))) <= 0.5);
  const RotationEstimate oracle = estimate_rotation_polar_oracle(a, b, 256);
  CHECK(rad2deg(mod_pi_distance(oracle.angle_mod_pi, deg2rad(30.0))) <= 360.0 / 256);
}

TEST_CASE("half turn is invisible mod pi") {
  std::mt19937_64 rng(36);
  const int n = 64;
  CartesianGrid g = testing::random_grid(n, rng);
  for (int r = 0; r < n; ++r) {
    g.values(r, 0) = 0.0;
    g.values(0, r) = 0.0;
  }
  const SpectralMagnitude a = magnitude(dft2(g));
  const SpectralMagnitude b = magnitude(dft2(rotate_grid(g, kPi)));
  RotationConfig cfg;
  cfg.bandwidth = 32;
  CHECK(mod_pi_distance(estimate_rotation(a, b, cfg).angle_mod_pi, 0.0) < 1e-6);
}

TEST_CASE("soft path agrees with the polar oracle on synthetic pairs") {
  std::mt19937_64 rng(37);
  int agree = 0;
  const int trials = 20;
  for (int i = 0; i < trials; ++i) {
    const SceneSpec spec = testing::random_scene(500 + i);
    std::uniform_real_distribution<double> angle(-180.0, 180.0);
    const SynthOutput out = testing::render_pair(spec, make_motion(0.0, 0.0, deg2rad(angle(rng))));
    const SpectralMagnitude a = scene_magnitude(out.frames[0].scan);
    const SpectralMagnitude b = scene_magnitude(out.frames[1].scan);
    const double soft = estimate_rotation(a, b).angle_mod_pi;
    const double oracle = estimate_rotation_polar_oracle(a, b, 256).angle_mod_pi;
    if (mod_pi_distance(soft, oracle) <= std::max(kPi / 128, 2 * kPi / 256)) ++agree;
  }
  CHECK(agree >= 19);
}

TEST_CASE("alternatives are distinct weaker maxima") {
  const SceneSpec spec = testing::random_scene(8);
  const SynthOutput out = testing::render_pair(spec, make_motion(5.0, 2.0, deg2rad(20.0)));
  const SpectralMagnitude a = scene_magnitude(out.frames[0].scan);
  const SpectralMagnitude b = scene_magnitude(out.frames[1].scan);
  RotationConfig cfg;
  cfg.alternatives = 3;
  const RotationEstimate est = estimate_rotation(a, b, cfg);
  CHECK(est.alternatives.size() <= 3u);
  for (double alt : est.alternatives) {
    CHECK(alt >= 0.0);
    CHECK(alt < kPi);
    CHECK(mod_pi_distance(alt, est.angle_mod_pi) > 0.0);
  }
  cfg.alternatives = 0;
  CHECK(estimate_rotation(a, b, cfg).alternatives.empty());
}
