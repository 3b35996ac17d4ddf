#pragma once

#include <string>
#include <vector>

#include "fs2d/matrix.hpp"

namespace fs2d {

/// One radar sweep: intensities indexed by (azimuth row, range bin).
/// Range bin i is centered at i * range_resolution meters.
struct PolarScan {
  std::vector<double> azimuths;  // radians, strictly ascending in [0, 2pi)
  Matrix<float> intensities;     // azimuth_count x range_bin_count, >= 0
  double range_resolution = 0.0;
  double timestamp = 0.0;

  std::size_t azimuth_count() const { return intensities.rows(); }
  std::size_t range_bin_count() const { return intensities.cols(); }
  double max_range() const;

  /// Throws InputError naming the first violated invariant.
  void validate() const;

  bool operator==(const PolarScan&) const = default;
};

/// Evenly spaced azimuths 2*pi*k/count.
std::vector<double> uniform_azimuths(std::size_t count);

enum class Window { kNone, kHann };

struct GridConfig {
  int grid_size = 256;         // cells per side, even, >= 32
  double cell_size = 0.75;     // meters
  double noise_floor = 0.05;   // fraction of the grid maximum
  Window window = Window::kHann;
  bool log_scale = false;
  double blind_radius = 0.0;   // meters; cells closer than this are zeroed
  bool despeckle = true;       // clean the polar scan before gridding

  void validate() const;
};

/// Square intensity image centered on the sensor. Cell (row, col) has its
/// center at x = (col - size/2) * cell_size, y = (row - size/2) * cell_size.
struct CartesianGrid {
  Matrix<double> values;
  double cell_size = 0.75;
  std::vector<std::string> warnings;

  int size() const { return static_cast<int>(values.rows()); }
  double extent() const { return size() * cell_size; }
};

/// Samples the scan at every cell center, bilinear in (azimuth, range).
/// Cells past the last range bin or inside the blind radius are zero. An
/// azimuth gap wider than twice the median step attaches a warning.
CartesianGrid polar_to_cartesian(const PolarScan& scan, const GridConfig& cfg);

/// Impulse and beam clean-up in the polar domain: a 5-tap median along
/// range removes salt-and-pepper runs up to two bins long, then each azimuth row loses
/// its median level (clamped at zero), which flattens full-range ghost beams
/// while leaving sparse returns in place.
PolarScan despeckle(const PolarScan& scan);

/// Thresholds at noise_floor * max, optionally applies log(1 + v), then
/// multiplies by the apodization window.
CartesianGrid preprocess(const CartesianGrid& grid, const GridConfig& cfg);

/// Radial Hann window: 0.5 * (1 + cos(pi * r / (size/2))) for r < size/2,
/// zero outside, with r the distance in cells from the center cell.
Matrix<double> radial_hann(int size);

/// Rotates the grid content by `radians` (counter-clockwise in x/y) about
/// the center cell with bilinear resampling. Samples falling outside the
/// grid read as zero.
CartesianGrid rotate_grid(const CartesianGrid& grid, double radians);

/// Cyclic shift: out(row + dy, col + dx) = in(row, col), indices mod size.
CartesianGrid circshift(const CartesianGrid& grid, int dx, int dy);

}  // namespace fs2d
