#pragma once

#include <complex>
#include <vector>

namespace rbev {

using cplx = std::complex<double>;

/// In-place forward DFT of arbitrary length. Power-of-two sizes use
/// iterative radix-2; other sizes go through Bluestein's chirp transform.
/// No normalization on the forward direction.
void fft(std::vector<cplx>& data);

/// In-place inverse DFT (1/N normalized).
void ifft(std::vector<cplx>& data);

/// Swap halves so that the zero-frequency bin moves to the center
/// (index n/2 for even n).
void fftshift(std::vector<cplx>& data);

bool is_power_of_two(std::size_t n);

}  // namespace rbev
