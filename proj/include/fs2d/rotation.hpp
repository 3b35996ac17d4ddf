#pragma once

#include <array>
#include <complex>
#include <memory>
#include <vector>

#include "fs2d/matrix.hpp"
#include "fs2d/spectral.hpp"

namespace fs2d {

/// Real function sampled on the 2B x 2B equiangular grid:
/// colatitude beta_j = pi (2j + 1) / (4B), longitude phi_k = pi k / B.
/// Rows index beta, columns index phi.
struct SphericalFunction {
  int bandwidth = 0;
  Matrix<double> samples;
};

/// Spherical-harmonic coefficients f_lm of a real function for l < B and
/// 0 <= m <= l, orthonormal basis with the Condon-Shortley phase. Negative
/// orders follow from f_{l,-m} = (-1)^m conj(f_lm).
class SphericalCoefficients {
 public:
  SphericalCoefficients() = default;
  explicit SphericalCoefficients(int bandwidth);

  int bandwidth() const { return bandwidth_; }
  std::complex<double>& operator()(int l, int m) { return c_[index(l, m)]; }
  const std::complex<double>& operator()(int l, int m) const {
    return c_[index(l, m)];
  }
  static std::size_t index(int l, int m) {
    return static_cast<std::size_t>(l) * (l + 1) / 2 + m;
  }

 private:
  int bandwidth_ = 0;
  std::vector<std::complex<double>> c_;
};

/// Quadrature weights and normalized associated Legendre tables for one
/// bandwidth. Immutable after construction; share freely across threads.
class SphericalTransformPlan {
 public:
  explicit SphericalTransformPlan(int bandwidth);

  /// Plan cached per bandwidth for the lifetime of the process.
  static std::shared_ptr<const SphericalTransformPlan> get(int bandwidth);

  int bandwidth() const { return bandwidth_; }
  double colatitude(int j) const;
  double longitude(int k) const;
  /// Driscoll-Healy weight: sum_j w_j p(cos beta_j) integrates p(cos beta)
  /// sin(beta) over [0, pi] exactly for polynomial degree < 2B.
  double weight(int j) const { return weights_[j]; }
  /// Normalized Legendre value such that Y_lm = legendre(l, m, j) e^{i m phi}.
  double legendre(int l, int m, int j) const {
    return legendre_[SphericalCoefficients::index(l, m) * (2 * bandwidth_) + j];
  }

 private:
  int bandwidth_;
  std::vector<double> weights_;
  std::vector<double> legendre_;
};

SphericalFunction project_to_sphere(const SpectralMagnitude& mag, int bandwidth);

SphericalCoefficients sphere_transform(const SphericalFunction& f);
SphericalFunction sphere_inverse(const SphericalCoefficients& coeffs);

/// Coefficients of g(beta, phi) = f(beta, phi - angle): rotation about the
/// polar axis by `angle`.
SphericalCoefficients rotate_about_polar_axis(const SphericalCoefficients& f,
                                              double angle);

/// C(gamma_k) = <Lambda(R_z(gamma_k)) f, g> on gamma_k = pi k / (B s),
/// k < 2Bs, s = oversample. The maximum is at gamma when g is f rotated about
/// the polar axis by gamma.
std::vector<double> so3_correlate(const SphericalCoefficients& f,
                                  const SphericalCoefficients& g, int oversample = 1);

struct RotationEstimate {
  /// B looks like A rotated by this angle, modulo pi. In [0, pi).
  double angle_mod_pi = 0.0;
  /// {angle, angle + pi}, normalized to (-pi, pi].
  std::array<double, 2> candidates{};
  /// Correlation over gamma_k = pi k / (B s), k < 2Bs, s = oversample.
  std::vector<double> correlation_profile;
  /// Weaker local maxima of the folded profile, strongest first, in [0, pi).
  std::vector<double> alternatives;
  /// Peak-to-second-peak ratio of the profile above its minimum, >= 1.
  double confidence = 1.0;
};

struct RotationConfig {
  int bandwidth = 128;
  bool interpolate = true;
  /// Profile samples per native step pi / B. The profile is a trigonometric
  /// polynomial of degree < B, so oversampling is exact, not interpolated.
  int oversample = 1;
  /// log1p of the magnitude before projection; flattens the dominant
  /// low-frequency lobes.
  bool log_magnitude = true;
  /// Secondary profile maxima reported in RotationEstimate::alternatives.
  int alternatives = 2;
};

/// Rotation between two magnitude spectra through the spherical projection
/// and polar-axis SO(3) correlation. Throws NoStructureError when the
/// profile is flat.
RotationEstimate estimate_rotation(const SpectralMagnitude& a,
                                   const SpectralMagnitude& b,
                                   const RotationConfig& cfg = {});

/// Baseline: radially integrated angular energy profiles on a polar grid,
/// aligned by brute-force circular correlation. No interpolation.
RotationEstimate estimate_rotation_polar_oracle(const SpectralMagnitude& a,
                                                const SpectralMagnitude& b,
                                                int angular_bins = 256,
                                                bool log_magnitude = true);

/// Vertex offset of the parabola through (-1, left), (0, center), (1, right),
/// clamped to [-0.5, 0.5]. Zero when the samples are not a strict maximum.
double parabolic_offset(double left, double center, double right);

}  // namespace fs2d
