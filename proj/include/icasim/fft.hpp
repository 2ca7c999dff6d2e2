#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace icasim::fft {

/// In-place iterative radix-2 FFT; size must be a power of two.
/// inverse = true applies the conjugate transform scaled by 1/N.
void transform(std::vector<std::complex<double>>& a, bool inverse);

std::size_t next_pow2(std::size_t n);

}  // namespace icasim::fft
