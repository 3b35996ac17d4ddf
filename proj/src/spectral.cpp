#include "fs2d/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fft.hpp"
#include "fs2d/errors.hpp"

namespace fs2d {
namespace {

using Complex = std::complex<double>;

int wrap_index(int i, int n) { return ((i % n) + n) % n; }

// Moves index 0 to n/2 (forward) or back (inverse) along both axes.
Matrix<Complex> shift_quadrants(const Matrix<Complex>& in, bool to_center) {
  const int n = static_cast<int>(in.rows());
  const int m = static_cast<int>(in.cols());
  Matrix<Complex> out(n, m);
  const int sr = to_center ? n / 2 : n - n / 2;
  const int sc = to_center ? m / 2 : m - m / 2;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < m; ++c) {
      out((r + sr) % n, (c + sc) % m) = in(r, c);
    }
  }
  return out;
}

}  // namespace

Shift CorrelationSurface::shift_of(int row, int col) const {
  const int n = size();
  auto signed_shift = [n](int i) { return i >= n / 2 ? i - n : i; };
  return {signed_shift(col), signed_shift(row)};
}

double CorrelationSurface::at(Shift s) const {
  const int n = size();
  return values(wrap_index(s.dy, n), wrap_index(s.dx, n));
}

Shift CorrelationSurface::argmax() const {
  const int n = size();
  int best_r = 0;
  int best_c = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (values(r, c) > best) {
        best = values(r, c);
        best_r = r;
        best_c = c;
      }
    }
  }
  return shift_of(best_r, best_c);
}

ComplexSpectrum dft2(const Matrix<double>& values) {
  const int n = static_cast<int>(values.rows());
  const int m = static_cast<int>(values.cols());
  Matrix<Complex> buf(n, m);
  for (std::size_t i = 0; i < values.size(); ++i) {
    buf.values()[i] = values.values()[i];
  }
  detail::fft2d(buf.values(), n, m, false);
  return {shift_quadrants(buf, true)};
}

ComplexSpectrum dft2(const CartesianGrid& grid) { return dft2(grid.values); }

Matrix<double> idft2_real(const ComplexSpectrum& spectrum) {
  const int n = static_cast<int>(spectrum.values.rows());
  const int m = static_cast<int>(spectrum.values.cols());
  Matrix<Complex> buf = shift_quadrants(spectrum.values, false);
  detail::fft2d(buf.values(), n, m, true);
  Matrix<double> out(n, m);
  const double scale = 1.0 / (static_cast<double>(n) * m);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values()[i] = buf.values()[i].real() * scale;
  }
  return out;
}

SpectralMagnitude magnitude(const ComplexSpectrum& spectrum) {
  Matrix<double> out(spectrum.values.rows(), spectrum.values.cols());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values()[i] = std::abs(spectrum.values.values()[i]);
  }
  return {std::move(out)};
}

ComplexSpectrum cross_power(const ComplexSpectrum& a, const ComplexSpectrum& b,
                            double eps) {
  if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols()) {
    throw GeometryError("cross_power: spectrum sizes differ");
  }
  if (!(eps > 0.0)) throw InputError("cross_power: eps must be positive");
  Matrix<Complex> out(a.values.rows(), a.values.cols());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Complex p = a.values.values()[i] * std::conj(b.values.values()[i]);
    out.values()[i] = p / std::max(std::abs(p), eps);
  }
  return {std::move(out)};
}

CorrelationSurface phase_correlate(const ComplexSpectrum& a,
                                   const ComplexSpectrum& b,
                                   const PhaseCorrelationConfig& cfg) {
  if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols()) {
    throw GeometryError("phase_correlate: grid sizes differ");
  }
  double peak = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    peak = std::max(peak, std::abs(a.values.values()[i]) *
                              std::abs(b.values.values()[i]));
  }
  const double eps =
      std::max(cfg.relative_eps * peak, std::numeric_limits<double>::min());
  // B * conj(A) puts the peak at +s for b = circshift(a, s).
  return {idft2_real(cross_power(b, a, eps))};
}

CorrelationSurface phase_correlate(const CartesianGrid& a, const CartesianGrid& b,
                                   const PhaseCorrelationConfig& cfg) {
  if (a.size() != b.size()) {
    throw GeometryError("phase_correlate: grid sizes differ");
  }
  if (std::abs(a.cell_size - b.cell_size) > 1e-12 * a.cell_size) {
    throw GeometryError("phase_correlate: cell sizes differ");
  }
  return phase_correlate(dft2(a), dft2(b), cfg);
}

}  // namespace fs2d
