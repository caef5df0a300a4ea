#pragma once

#include <complex>
#include <vector>

namespace panfuse::detail {

// In-place iterative radix-2 FFT. n must be a power of two >= 1.
void fft_pow2(std::vector<std::complex<double>>& data);

// Forward 2-D DFT of an n x n real image (row-major), n a power of two.
// Returns the full complex spectrum, row-major, unnormalized.
std::vector<std::complex<double>> fft2_real(const std::vector<double>& img,
                                            int n);

bool is_pow2(int n);

}  // namespace panfuse::detail
