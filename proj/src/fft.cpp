#include "mbl/fft.hpp"

#include <cmath>
#include <stdexcept>

#include "mbl/parallel.hpp"

namespace mbl {

namespace {

bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Twiddle table for stride-doubling stages: w[k] = exp(-2*pi*i*k/n).
std::vector<std::complex<double>> twiddles(size_t n, bool inverse) {
    std::vector<std::complex<double>> w(n / 2);
    double sign = inverse ? 1.0 : -1.0;
    for (size_t k = 0; k < n / 2; ++k) {
        double ang = sign * 2.0 * 3.141592653589793 * double(k) / double(n);
        w[k] = {std::cos(ang), std::sin(ang)};
    }
    return w;
}

void fft_with_table(std::complex<double>* a, size_t n,
                    const std::vector<std::complex<double>>& w) {
    // bit reversal
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        size_t step = n / len;
        for (size_t i = 0; i < n; i += len) {
            for (size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = a[i + k];
                std::complex<double> v = a[i + k + len / 2] * w[k * step];
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

} // namespace

void fft(std::complex<double>* data, size_t n, bool inverse) {
    if (!is_pow2(n)) throw std::invalid_argument("fft: length must be a power of two");
    if (n == 1) return;
    auto w = twiddles(n, inverse);
    fft_with_table(data, n, w);
    if (inverse) {
        double s = 1.0 / double(n);
        for (size_t i = 0; i < n; ++i) data[i] *= s;
    }
}

void fft2(std::vector<std::complex<double>>& data, size_t rows, size_t cols,
          bool inverse) {
    if (!is_pow2(rows) || !is_pow2(cols))
        throw std::invalid_argument("fft2: dimensions must be powers of two");
    if (data.size() != rows * cols)
        throw std::invalid_argument("fft2: data size mismatch");

    if (cols > 1) {
        auto w = twiddles(cols, inverse);
        parallel_for(0, int64_t(rows), [&](int64_t r0, int64_t r1) {
            for (int64_t r = r0; r < r1; ++r)
                fft_with_table(&data[size_t(r) * cols], cols, w);
        });
    }
    if (rows > 1) {
        auto w = twiddles(rows, inverse);
        parallel_for(0, int64_t(cols), [&](int64_t c0, int64_t c1) {
            std::vector<std::complex<double>> col(rows);
            for (int64_t c = c0; c < c1; ++c) {
                for (size_t r = 0; r < rows; ++r) col[r] = data[r * cols + size_t(c)];
                fft_with_table(col.data(), rows, w);
                for (size_t r = 0; r < rows; ++r) data[r * cols + size_t(c)] = col[r];
            }
        });
    }
    if (inverse) {
        double s = 1.0 / double(rows * cols);
        for (auto& z : data) z *= s;
    }
}

} // namespace mbl
