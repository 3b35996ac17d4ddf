#include "fs2d/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>

#include "fft.hpp"
#include "fs2d/errors.hpp"
#include "fs2d/se2.hpp"

namespace fs2d {
namespace {

using Complex = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// Frequency radius below which the magnitude is dropped before projection.
constexpr double kDcCutoff = 2.0;
constexpr double kConfidenceClamp = 1e6;

double sample_magnitude(const Matrix<double>& m, double row, double col) {
  const auto n = static_cast<long>(m.rows());
  const double r0f = std::floor(row);
  const double c0f = std::floor(col);
  const auto r0 = static_cast<long>(r0f);
  const auto c0 = static_cast<long>(c0f);
  const double fr = row - r0f;
  const double fc = col - c0f;
  auto at = [&](long r, long c) {
    return (r < 0 || c < 0 || r >= n || c >= n) ? 0.0 : m(r, c);
  };
  return (1 - fr) * ((1 - fc) * at(r0, c0) + fc * at(r0, c0 + 1)) +
         fr * ((1 - fc) * at(r0 + 1, c0) + fc * at(r0 + 1, c0 + 1));
}

// Largest usable frequency radius in bins; keeps bilinear reads inside.
double max_frequency_radius(int size) { return size / 2 - 1; }

// Index of the maximum; ties go to the lowest index.
std::size_t argmax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

// Peak-to-second-local-peak ratio of a cyclic profile above its minimum.
double cyclic_peak_ratio(const std::vector<double>& p) {
  const std::size_t n = p.size();
  const std::size_t top = argmax(p);
  const double floor = *std::min_element(p.begin(), p.end());
  const double first = p[top] - floor;
  if (!(first > 0.0)) return 1.0;
  double second = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == top) continue;
    const double prev = p[(k + n - 1) % n];
    const double next = p[(k + 1) % n];
    if (p[k] > prev && p[k] >= next) second = std::max(second, p[k] - floor);
  }
  if (second <= first / kConfidenceClamp) return kConfidenceClamp;
  return std::max(1.0, first / second);
}

// Folds a period-2B profile onto [0, pi) and returns the refined argmax in
// units of samples.
double folded_peak(const std::vector<double>& folded, bool interpolate) {
  const std::size_t n = folded.size();
  const std::size_t k = argmax(folded);
  if (!interpolate) return static_cast<double>(k);
  const double offset = parabolic_offset(folded[(k + n - 1) % n], folded[k],
                                         folded[(k + 1) % n]);
  return static_cast<double>(k) + offset;
}

// Refined positions of the strongest local maxima other than `top`, in
// samples, strongest first.
std::vector<double> secondary_peaks(const std::vector<double>& p, std::size_t top,
                                    int count, bool interpolate) {
  const std::size_t n = p.size();
  std::vector<std::size_t> maxima;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == top) continue;
    const double prev = p[(k + n - 1) % n];
    const double next = p[(k + 1) % n];
    if (p[k] > prev && p[k] >= next) maxima.push_back(k);
  }
  std::stable_sort(maxima.begin(), maxima.end(),
                   [&](std::size_t i, std::size_t j) { return p[i] > p[j]; });
  if (static_cast<int>(maxima.size()) > count) maxima.resize(count);
  std::vector<double> out;
  for (std::size_t k : maxima) {
    const double offset =
        interpolate ? parabolic_offset(p[(k + n - 1) % n], p[k], p[(k + 1) % n]) : 0.0;
    out.push_back(static_cast<double>(k) + offset);
  }
  return out;
}

double wrap_pi(double angle) {
  angle = std::fmod(angle, kPi);
  if (angle < 0.0) angle += kPi;
  if (angle >= kPi) angle -= kPi;
  return angle;
}

// log(1 + m / mean(m)); the division keeps the result independent of the
// intensity scale.
SpectralMagnitude compressed(const SpectralMagnitude& mag) {
  SpectralMagnitude out = mag;
  auto values = out.values.values();
  if (values.empty()) return out;
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (!(mean > 0.0)) return out;
  for (double& v : values) v = std::log1p(v / mean);
  return out;
}

RotationEstimate make_estimate(double angle, std::vector<double> profile,
                               double confidence) {
  RotationEstimate est;
  angle = wrap_pi(angle);
  est.angle_mod_pi = angle;
  est.candidates = {normalize_angle(angle), normalize_angle(angle + kPi)};
  est.correlation_profile = std::move(profile);
  est.confidence = confidence;
  return est;
}

}  // namespace

double parabolic_offset(double left, double center, double right) {
  const double denom = 2.0 * center - left - right;
  if (!(denom > 0.0) || center < left || center < right) return 0.0;
  return std::clamp((right - left) / (2.0 * denom), -0.5, 0.5);
}

SphericalCoefficients::SphericalCoefficients(int bandwidth)
    : bandwidth_(bandwidth), c_(index(bandwidth, 0), Complex{}) {}

SphericalTransformPlan::SphericalTransformPlan(int bandwidth)
    : bandwidth_(bandwidth) {
  if (bandwidth < 1) throw InputError("bandwidth must be positive");
  const int nb = 2 * bandwidth;

  weights_.resize(nb);
  for (int j = 0; j < nb; ++j) {
    const double beta = colatitude(j);
    double sum = 0.0;
    for (int k = 0; k < bandwidth; ++k) {
      sum += std::sin((2 * j + 1) * (2 * k + 1) * kPi / (4.0 * bandwidth)) /
             (2 * k + 1);
    }
    weights_[j] = 2.0 / bandwidth * std::sin(beta) * sum;
  }

  // Orthonormal associated Legendre functions by the standard three-term
  // recurrence in l at fixed m.
  legendre_.assign(SphericalCoefficients::index(bandwidth, 0) * nb, 0.0);
  auto at = [&](int l, int m, int j) -> double& {
    return legendre_[SphericalCoefficients::index(l, m) * nb + j];
  };
  for (int j = 0; j < nb; ++j) {
    const double x = std::cos(colatitude(j));
    const double s = std::sin(colatitude(j));
    double pmm = std::sqrt(1.0 / (4.0 * kPi));
    for (int m = 0; m < bandwidth; ++m) {
      if (m > 0) pmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
      at(m, m, j) = pmm;
      if (m + 1 < bandwidth) at(m + 1, m, j) = std::sqrt(2.0 * m + 3.0) * x * pmm;
      for (int l = m + 2; l < bandwidth; ++l) {
        const double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
        const double b = std::sqrt((double(l - 1) * (l - 1) - double(m) * m) /
                                   (4.0 * (l - 1) * (l - 1) - 1.0));
        at(l, m, j) = a * (x * at(l - 1, m, j) - b * at(l - 2, m, j));
      }
    }
  }
}

std::shared_ptr<const SphericalTransformPlan> SphericalTransformPlan::get(
    int bandwidth) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const SphericalTransformPlan>> plans;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = plans[bandwidth];
  if (!slot) slot = std::make_shared<const SphericalTransformPlan>(bandwidth);
  return slot;
}

double SphericalTransformPlan::colatitude(int j) const {
  return kPi * (2 * j + 1) / (4.0 * bandwidth_);
}

double SphericalTransformPlan::longitude(int k) const {
  return kPi * k / bandwidth_;
}

SphericalFunction project_to_sphere(const SpectralMagnitude& mag, int bandwidth) {
  const int n = mag.size();
  if (bandwidth < 16) throw InputError("bandwidth must be >= 16");
  const double rho_max = max_frequency_radius(n);
  // The outermost usable ring of the magnitude holds about 8 * rho_max
  // distinct bins; more longitude samples than that only interpolate.
  if (2.0 * bandwidth > 8.0 * rho_max) {
    throw InputError("bandwidth " + std::to_string(bandwidth) +
                     " exceeds the angular resolution of a " + std::to_string(n) +
                     "-point magnitude");
  }
  const int nb = 2 * bandwidth;
  SphericalFunction f{bandwidth, Matrix<double>(nb, nb, 0.0)};
  const double center = n / 2;
  for (int j = 0; j < bandwidth; ++j) {
    const double beta = kPi * (2 * j + 1) / (4.0 * bandwidth);
    const double rho = rho_max * beta / (kPi / 2.0);
    if (rho < kDcCutoff) continue;
    for (int k = 0; k < nb; ++k) {
      const double phi = kPi * k / bandwidth;
      const double v = sample_magnitude(mag.values, center + rho * std::sin(phi),
                                        center + rho * std::cos(phi));
      f.samples(j, k) = v;
      // Southern mirror: beta -> pi - beta, phi -> phi + pi.
      f.samples(nb - 1 - j, (k + bandwidth) % nb) = v;
    }
  }
  return f;
}

SphericalCoefficients sphere_transform(const SphericalFunction& f) {
  const int bw = f.bandwidth;
  const int nb = 2 * bw;
  if (static_cast<int>(f.samples.rows()) != nb ||
      static_cast<int>(f.samples.cols()) != nb) {
    throw InputError("sphere_transform: samples are not 2B x 2B");
  }
  const auto plan = SphericalTransformPlan::get(bw);

  // Longitude FFT per ring, pre-scaled by the quadrature weight.
  Matrix<Complex> rings(nb, nb);
  for (int j = 0; j < nb; ++j) {
    auto row = rings.row(j);
    for (int k = 0; k < nb; ++k) row[k] = f.samples(j, k);
    detail::fft1d(row, false);
    const double scale = plan->weight(j) * (2.0 * kPi / nb);
    for (auto& v : row) v *= scale;
  }

  SphericalCoefficients out(bw);
  for (int m = 0; m < bw; ++m) {
    for (int l = m; l < bw; ++l) {
      Complex acc{};
      for (int j = 0; j < nb; ++j) acc += plan->legendre(l, m, j) * rings(j, m);
      out(l, m) = acc;
    }
  }
  return out;
}

SphericalFunction sphere_inverse(const SphericalCoefficients& coeffs) {
  const int bw = coeffs.bandwidth();
  const int nb = 2 * bw;
  const auto plan = SphericalTransformPlan::get(bw);
  SphericalFunction f{bw, Matrix<double>(nb, nb, 0.0)};
  std::vector<Complex> ring(nb);
  for (int j = 0; j < nb; ++j) {
    std::fill(ring.begin(), ring.end(), Complex{});
    for (int m = 0; m < bw; ++m) {
      Complex acc{};
      for (int l = m; l < bw; ++l) acc += coeffs(l, m) * plan->legendre(l, m, j);
      ring[m] = m == 0 ? Complex(acc.real(), 0.0) : 2.0 * acc;
    }
    detail::fft1d(ring, true);
    for (int k = 0; k < nb; ++k) f.samples(j, k) = ring[k].real();
  }
  return f;
}

SphericalCoefficients rotate_about_polar_axis(const SphericalCoefficients& f,
                                              double angle) {
  SphericalCoefficients out = f;
  for (int l = 0; l < f.bandwidth(); ++l) {
    for (int m = 0; m <= l; ++m) {
      out(l, m) = f(l, m) * std::polar(1.0, -m * angle);
    }
  }
  return out;
}

std::vector<double> so3_correlate(const SphericalCoefficients& f,
                                  const SphericalCoefficients& g, int oversample) {
  if (f.bandwidth() != g.bandwidth()) {
    throw GeometryError("so3_correlate: bandwidth mismatch");
  }
  if (oversample < 1) throw InputError("so3_correlate: oversample must be >= 1");
  const int bw = f.bandwidth();
  const int nb = 2 * bw * oversample;
  // C(gamma) = sum_lm f_lm conj(g_lm) e^{-i m gamma}; real inputs fold the
  // negative orders into twice the real part.
  std::vector<Complex> spectrum(nb, Complex{});
  for (int m = 0; m < bw; ++m) {
    Complex acc{};
    for (int l = m; l < bw; ++l) acc += f(l, m) * std::conj(g(l, m));
    spectrum[m] = m == 0 ? Complex(acc.real(), 0.0) : 2.0 * acc;
  }
  // sum_m s_m e^{-i m gamma_k} with gamma_k = 2 pi k / nb is a forward DFT;
  // the zero padding above m < B evaluates the same trigonometric polynomial
  // on a finer grid.
  detail::fft1d(spectrum, false);
  std::vector<double> profile(nb);
  for (int k = 0; k < nb; ++k) profile[k] = spectrum[k].real();
  return profile;
}

RotationEstimate estimate_rotation(const SpectralMagnitude& a,
                                   const SpectralMagnitude& b,
                                   const RotationConfig& cfg) {
  if (a.size() != b.size()) {
    throw GeometryError("estimate_rotation: magnitude sizes differ");
  }
  if (cfg.alternatives < 0) throw InputError("alternatives must be >= 0");
  const int bw = cfg.bandwidth;
  const auto fa = sphere_transform(
      project_to_sphere(cfg.log_magnitude ? compressed(a) : a, bw));
  const auto fb = sphere_transform(
      project_to_sphere(cfg.log_magnitude ? compressed(b) : b, bw));
  if (cfg.oversample < 1) throw InputError("oversample must be >= 1");
  std::vector<double> profile = so3_correlate(fa, fb, cfg.oversample);
  const int half = bw * cfg.oversample;

  const double peak = *std::max_element(profile.begin(), profile.end());
  const double mean =
      std::accumulate(profile.begin(), profile.end(), 0.0) / profile.size();
  if (!(mean > 0.0) || peak / mean < 1.0 + 1e-6) {
    throw NoStructureError("rotation correlation profile is flat");
  }

  // Magnitudes are point-symmetric, so the profile has period pi.
  std::vector<double> folded(half);
  for (int k = 0; k < half; ++k) folded[k] = profile[k] + profile[k + half];
  const double position = folded_peak(folded, cfg.interpolate);
  const double confidence = cyclic_peak_ratio(folded);
  std::vector<double> others =
      secondary_peaks(folded, argmax(folded), cfg.alternatives, cfg.interpolate);
  RotationEstimate est =
      make_estimate(position * kPi / half, std::move(profile), confidence);
  for (double k : others) est.alternatives.push_back(wrap_pi(k * kPi / half));
  return est;
}

RotationEstimate estimate_rotation_polar_oracle(const SpectralMagnitude& a,
                                                const SpectralMagnitude& b,
                                                int angular_bins,
                                                bool log_magnitude) {
  if (a.size() != b.size()) {
    throw GeometryError("estimate_rotation_polar_oracle: magnitude sizes differ");
  }
  if (angular_bins < 4 || angular_bins % 2 != 0) {
    throw InputError("angular_bins must be even and >= 4");
  }
  const int n = a.size();
  const double rho_max = max_frequency_radius(n);
  const double center = n / 2;

  auto angular_profile = [&](const SpectralMagnitude& mag) {
    std::vector<double> p(angular_bins, 0.0);
    for (int t = 0; t < angular_bins; ++t) {
      const double phi = 2.0 * kPi * t / angular_bins;
      const double c = std::cos(phi);
      const double s = std::sin(phi);
      for (double rho = kDcCutoff; rho <= rho_max; rho += 1.0) {
        p[t] += sample_magnitude(mag.values, center + rho * s, center + rho * c);
      }
    }
    return p;
  };
  const std::vector<double> pa = angular_profile(log_magnitude ? compressed(a) : a);
  const std::vector<double> pb = angular_profile(log_magnitude ? compressed(b) : b);

  std::vector<double> corr(angular_bins, 0.0);
  for (int s = 0; s < angular_bins; ++s) {
    for (int t = 0; t < angular_bins; ++t) {
      corr[s] += pa[t] * pb[(t + s) % angular_bins];
    }
  }
  const double peak = *std::max_element(corr.begin(), corr.end());
  const double mean = std::accumulate(corr.begin(), corr.end(), 0.0) / corr.size();
  if (!(mean > 0.0) || peak / mean < 1.0 + 1e-6) {
    throw NoStructureError("polar correlation profile is flat");
  }
  const int half = angular_bins / 2;
  std::vector<double> folded(half);
  for (int s = 0; s < half; ++s) folded[s] = corr[s] + corr[s + half];
  const std::size_t best = argmax(folded);
  return make_estimate(2.0 * kPi * best / angular_bins, std::move(corr),
                       cyclic_peak_ratio(folded));
}

}  // namespace fs2d
