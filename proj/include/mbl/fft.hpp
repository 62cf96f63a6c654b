#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace mbl {

inline size_t next_pow2(size_t n) {
    size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// In-place radix-2 complex FFT; n must be a power of two.
void fft(std::complex<double>* data, size_t n, bool inverse);

// Row-major 2D FFT; rows and cols must be powers of two. The inverse
// applies the 1/(rows*cols) normalization. Row/column transforms run in
// parallel with schedule-independent results.
void fft2(std::vector<std::complex<double>>& data, size_t rows, size_t cols,
          bool inverse);

} // namespace mbl
