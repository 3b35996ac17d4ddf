#pragma once

#include <complex>

#include "fs2d/grid.hpp"
#include "fs2d/matrix.hpp"

namespace fs2d {

/// 2D DFT with the DC component at (size/2, size/2). Unnormalized forward
/// transform, X(k) = sum_n x(n) exp(-2*pi*i*k.n/N), so that
/// sum |X|^2 = N^2 * sum x^2.
struct ComplexSpectrum {
  Matrix<std::complex<double>> values;
  int size() const { return static_cast<int>(values.rows()); }
};

/// Elementwise modulus of a DC-centered spectrum.
struct SpectralMagnitude {
  Matrix<double> values;
  int size() const { return static_cast<int>(values.rows()); }
};

/// Integer cyclic shift in cells; dx along columns (x), dy along rows (y).
struct Shift {
  int dx = 0;
  int dy = 0;
  bool operator==(const Shift&) const = default;
};

/// Real correlation surface. Cell (row, col) holds the response for the
/// cyclic shift (dx = col, dy = row); see shift_of().
struct CorrelationSurface {
  Matrix<double> values;
  int size() const { return static_cast<int>(values.rows()); }

  /// Shift for a cell, wrapped to [-size/2, size/2).
  Shift shift_of(int row, int col) const;
  /// Cell holding a (possibly negative) shift.
  double at(Shift s) const;
  /// Row-major argmax; ties go to the lowest index.
  Shift argmax() const;
};

struct PhaseCorrelationConfig {
  /// Whitening guard relative to max |A conj(B)|.
  double relative_eps = 1e-12;
};

ComplexSpectrum dft2(const CartesianGrid& grid);
ComplexSpectrum dft2(const Matrix<double>& values);

/// Inverse of dft2 (includes the 1/N^2 factor), returning the real part.
Matrix<double> idft2_real(const ComplexSpectrum& spectrum);

SpectralMagnitude magnitude(const ComplexSpectrum& spectrum);

/// A * conj(B) / max(|A * conj(B)|, eps), elementwise. eps is absolute.
ComplexSpectrum cross_power(const ComplexSpectrum& a, const ComplexSpectrum& b,
                            double eps);

/// Phase correlation of two grids. The peak sits at shift s when b equals
/// a cyclically shifted by s (b = circshift(a, s)). Values are normalized
/// so an exact cyclic shift yields a peak of 1.
CorrelationSurface phase_correlate(const CartesianGrid& a, const CartesianGrid& b,
                                   const PhaseCorrelationConfig& cfg = {});

/// Same as phase_correlate, on precomputed spectra.
CorrelationSurface phase_correlate(const ComplexSpectrum& a,
                                   const ComplexSpectrum& b,
                                   const PhaseCorrelationConfig& cfg = {});

}  // namespace fs2d
