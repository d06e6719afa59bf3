#include "radarbev/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rbev {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Iterative Cooley-Tukey, n must be a power of two.
void fft_radix2(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n < 2) return;

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? kTwoPi : -kTwoPi) / double(len);
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Bluestein's algorithm: DFT of arbitrary length via a circular
// convolution of length >= 2n-1 (rounded up to a power of two).
void fft_bluestein(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    const std::size_t m = next_pow2(2 * n - 1);
    const double sign = inverse ? 1.0 : -1.0;

    // chirp c[k] = exp(sign * i * pi * k^2 / n); k^2 mod 2n avoids
    // precision loss for large k.
    std::vector<cplx> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t k2 = (k * k) % (2 * n);
        const double ang = sign * std::numbers::pi * double(k2) / double(n);
        chirp[k] = cplx(std::cos(ang), std::sin(ang));
    }

    std::vector<cplx> fa(m, cplx(0, 0)), fb(m, cplx(0, 0));
    for (std::size_t k = 0; k < n; ++k) fa[k] = a[k] * chirp[k];
    fb[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) {
        fb[k] = std::conj(chirp[k]);
        fb[m - k] = fb[k];
    }

    fft_radix2(fa, false);
    fft_radix2(fb, false);
    for (std::size_t k = 0; k < m; ++k) fa[k] *= fb[k];
    fft_radix2(fa, true);
    const double inv_m = 1.0 / double(m);
    for (std::size_t k = 0; k < n; ++k) a[k] = fa[k] * inv_m * chirp[k];
}

}  // namespace

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft(std::vector<cplx>& data) {
    if (data.size() < 2) return;
    if (is_power_of_two(data.size()))
        fft_radix2(data, false);
    else
        fft_bluestein(data, false);
}

void ifft(std::vector<cplx>& data) {
    const std::size_t n = data.size();
    if (n < 2) return;
    if (is_power_of_two(n))
        fft_radix2(data, true);
    else
        fft_bluestein(data, true);
    const double inv = 1.0 / double(n);
    for (auto& z : data) z *= inv;
}

void fftshift(std::vector<cplx>& data) {
    const std::size_t n = data.size();
    std::rotate(data.begin(), data.begin() + (n + 1) / 2, data.end());
}

}  // namespace rbev
