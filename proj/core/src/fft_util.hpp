#pragma once

#include <complex>
#include <span>
#include <vector>

namespace geotail::detail {

/// In-place complex DFT (FFTW backend). FFTW's planner is not thread-safe, so
/// planning is serialized behind a mutex internally; execution is concurrent.
void fft_complex_forward(std::vector<std::complex<double>>& data);

/// Real-to-complex forward DFT; returns the n/2 + 1 non-redundant bins.
std::vector<std::complex<double>> fft_real_forward(std::span<const double> data);

}  // namespace geotail::detail
