#include "fs2d/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fs2d/errors.hpp"

namespace fs2d {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Bilinear read with out-of-range neighbors treated as zero.
double sample_bilinear(const Matrix<double>& m, double row, double col) {
  const double r0f = std::floor(row);
  const double c0f = std::floor(col);
  const auto r0 = static_cast<long>(r0f);
  const auto c0 = static_cast<long>(c0f);
  const double fr = row - r0f;
  const double fc = col - c0f;
  const auto rows = static_cast<long>(m.rows());
  const auto cols = static_cast<long>(m.cols());
  auto at = [&](long r, long c) {
    return (r < 0 || c < 0 || r >= rows || c >= cols) ? 0.0 : m(r, c);
  };
  return (1 - fr) * ((1 - fc) * at(r0, c0) + fc * at(r0, c0 + 1)) +
         fr * ((1 - fc) * at(r0 + 1, c0) + fc * at(r0 + 1, c0 + 1));
}

}  // namespace

double PolarScan::max_range() const {
  return range_bin_count() == 0 ? 0.0
                                : (range_bin_count() - 1) * range_resolution;
}

void PolarScan::validate() const {
  if (intensities.rows() == 0 || intensities.cols() == 0) {
    throw InputError("scan: azimuth_count and range_bin_count must be positive");
  }
  if (azimuths.size() != intensities.rows()) {
    throw InputError("scan: azimuth angle count does not match intensity rows");
  }
  if (!(range_resolution > 0.0) || !std::isfinite(range_resolution)) {
    throw InputError("scan: range_resolution must be positive");
  }
  for (std::size_t i = 0; i < azimuths.size(); ++i) {
    if (!(azimuths[i] >= 0.0 && azimuths[i] < kTwoPi)) {
      throw InputError("scan: azimuth " + std::to_string(i) + " outside [0, 2pi)");
    }
    if (i > 0 && !(azimuths[i] > azimuths[i - 1])) {
      throw InputError("scan: azimuths not strictly ascending at index " +
                       std::to_string(i));
    }
  }
  for (float v : intensities.values()) {
    if (!(v >= 0.0f) || !std::isfinite(v)) {
      throw InputError("scan: intensities must be finite and non-negative");
    }
  }
}

std::vector<double> uniform_azimuths(std::size_t count) {
  std::vector<double> az(count);
  for (std::size_t k = 0; k < count; ++k) {
    az[k] = kTwoPi * static_cast<double>(k) / static_cast<double>(count);
  }
  return az;
}

void GridConfig::validate() const {
  if (grid_size < 32 || grid_size % 2 != 0) {
    throw InputError("grid_size must be even and >= 32");
  }
  if (!(cell_size > 0.0)) throw InputError("cell_size must be positive");
  if (!(noise_floor >= 0.0 && noise_floor <= 1.0)) {
    throw InputError("noise_floor must lie in [0, 1]");
  }
  if (!(blind_radius >= 0.0)) throw InputError("blind_radius must be >= 0");
}

PolarScan despeckle(const PolarScan& scan) {
  scan.validate();
  // Runs of up to two bright bins are treated as impulses.
  constexpr std::size_t kHalf = 2;
  PolarScan out = scan;
  const std::size_t nr = scan.range_bin_count();
  std::vector<float> window;
  std::vector<float> sorted(nr);
  for (std::size_t a = 0; a < scan.azimuth_count(); ++a) {
    const auto in = scan.intensities.row(a);
    auto row = out.intensities.row(a);
    for (std::size_t r = 0; r < nr; ++r) {
      const std::size_t lo = r >= kHalf ? r - kHalf : 0;
      const std::size_t hi = std::min(nr, r + kHalf + 1);
      window.assign(in.begin() + lo, in.begin() + hi);
      std::nth_element(window.begin(), window.begin() + window.size() / 2, window.end());
      row[r] = window[window.size() / 2];
    }
    // A beam lit end to end has a high median; taking it off flattens ghost beams.
    std::copy(row.begin(), row.end(), sorted.begin());
    std::nth_element(sorted.begin(), sorted.begin() + nr / 2, sorted.end());
    const float level = sorted[nr / 2];
    for (float& v : row) v = std::max(v - level, 0.0f);
  }
  return out;
}

CartesianGrid polar_to_cartesian(const PolarScan& scan, const GridConfig& cfg) {
  scan.validate();
  cfg.validate();

  const int n = cfg.grid_size;
  CartesianGrid grid{Matrix<double>(n, n, 0.0), cfg.cell_size, {}};

  const std::vector<double>& az = scan.azimuths;
  const std::size_t na = az.size();
  const std::size_t nr = scan.range_bin_count();

  // Cyclic azimuth steps; the last one wraps through 2*pi.
  std::vector<double> steps(na);
  for (std::size_t i = 0; i < na; ++i) {
    steps[i] = (i + 1 < na) ? az[i + 1] - az[i] : az[0] + kTwoPi - az[i];
  }
  if (na > 1) {
    std::vector<double> sorted = steps;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                     sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double widest = *std::max_element(steps.begin(), steps.end());
    if (widest > 2.0 * median) {
      std::ostringstream msg;
      msg << "degraded azimuth coverage: gap of " << widest
          << " rad exceeds twice the median step " << median;
      grid.warnings.push_back(msg.str());
    }
  }

  const double max_range = scan.max_range();
  for (int row = 0; row < n; ++row) {
    const double y = (row - n / 2) * cfg.cell_size;
    for (int col = 0; col < n; ++col) {
      const double x = (col - n / 2) * cfg.cell_size;
      const double rho = std::hypot(x, y);
      if (rho > max_range || rho < cfg.blind_radius) continue;

      double phi = std::atan2(y, x);
      if (phi < 0.0) phi += kTwoPi;

      // Bracketing azimuth rows a0 <= phi < a1, cyclically.
      std::size_t a0;
      double t;
      const auto it = std::upper_bound(az.begin(), az.end(), phi);
      if (it == az.begin()) {
        a0 = na - 1;
        t = (phi + kTwoPi - az[a0]) / steps[a0];
      } else {
        a0 = static_cast<std::size_t>(it - az.begin()) - 1;
        t = (phi - az[a0]) / steps[a0];
      }
      const std::size_t a1 = (a0 + 1) % na;
      if (na == 1) t = 0.0;

      const double q = rho / scan.range_resolution;
      const auto r0 = std::min(static_cast<std::size_t>(q), nr - 1);
      const std::size_t r1 = std::min(r0 + 1, nr - 1);
      const double u = q - static_cast<double>(r0);

      const auto& I = scan.intensities;
      const double v0 = (1 - u) * I(a0, r0) + u * I(a0, r1);
      const double v1 = (1 - u) * I(a1, r0) + u * I(a1, r1);
      grid.values(row, col) = (1 - t) * v0 + t * v1;
    }
  }
  return grid;
}

Matrix<double> radial_hann(int size) {
  Matrix<double> w(size, size, 0.0);
  const double radius = size / 2.0;
  for (int row = 0; row < size; ++row) {
    for (int col = 0; col < size; ++col) {
      const double r = std::hypot(row - size / 2, col - size / 2);
      if (r < radius) {
        w(row, col) = 0.5 * (1.0 + std::cos(std::numbers::pi * r / radius));
      }
    }
  }
  return w;
}

CartesianGrid preprocess(const CartesianGrid& grid, const GridConfig& cfg) {
  CartesianGrid out = grid;
  auto values = out.values.values();
  const double peak =
      values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  const double floor = cfg.noise_floor * peak;
  for (double& v : values) {
    if (v < floor) v = 0.0;
    if (cfg.log_scale) v = std::log1p(v);
  }
  if (cfg.window == Window::kHann) {
    const Matrix<double> w = radial_hann(out.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] *= w.values()[i];
  }
  return out;
}

CartesianGrid rotate_grid(const CartesianGrid& grid, double radians) {
  const int n = grid.size();
  CartesianGrid out{Matrix<double>(n, n, 0.0), grid.cell_size, grid.warnings};
  const double c = std::cos(radians);
  const double s = std::sin(radians);
  const double center = n / 2;
  for (int row = 0; row < n; ++row) {
    const double y = row - center;
    for (int col = 0; col < n; ++col) {
      const double x = col - center;
      // Inverse rotation: where did this output cell come from.
      const double sx = c * x + s * y;
      const double sy = -s * x + c * y;
      out.values(row, col) = sample_bilinear(grid.values, sy + center, sx + center);
    }
  }
  return out;
}

CartesianGrid circshift(const CartesianGrid& grid, int dx, int dy) {
  const int n = grid.size();
  CartesianGrid out{Matrix<double>(n, n, 0.0), grid.cell_size, grid.warnings};
  auto wrap = [n](int i) { return ((i % n) + n) % n; };
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      out.values(wrap(row + dy), wrap(col + dx)) = grid.values(row, col);
    }
  }
  return out;
}

}  // namespace fs2d
