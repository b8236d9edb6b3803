#pragma once

// Iterative radix-2 complex FFT, power-of-two sizes only.

#include <complex>
#include <cstddef>
#include <vector>

namespace rvk {

// In-place forward DFT, no scaling. data.size() must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& data);

}  // namespace rvk
