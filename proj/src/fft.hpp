#pragma once

#include <complex>
#include <span>

namespace fs2d::detail {

/// In-place unnormalized DFT. Forward uses exp(-2*pi*i*k*n/N), inverse the
/// conjugate kernel without the 1/N factor.
void fft1d(std::span<std::complex<double>> data, bool inverse);

/// In-place unnormalized 2D DFT of a row-major rows x cols array.
void fft2d(std::span<std::complex<double>> data, int rows, int cols, bool inverse);

}  // namespace fs2d::detail
