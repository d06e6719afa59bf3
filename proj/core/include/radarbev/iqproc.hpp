#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "radarbev/types.hpp"

namespace rbev {

/// Dense complex matrix, row-major.
struct ComplexMat {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<std::complex<double>> v;

    ComplexMat() = default;
    ComplexMat(std::uint32_t r, std::uint32_t c)
        : rows(r), cols(c), v(std::size_t(r) * c, {0.0, 0.0}) {}

    std::complex<double> at(std::uint32_t r, std::uint32_t c) const {
        return v[std::size_t(r) * cols + c];
    }
    std::complex<double>& at(std::uint32_t r, std::uint32_t c) {
        return v[std::size_t(r) * cols + c];
    }
};

enum class RangeWindow { Hann, Rect };

/// BEV geometry knobs for the I/Q -> BEV pipeline. The paper's native
/// geometry is 256x512 at 4 cm range resolution; field of view defaults to
/// +-90 degrees since the capture hardware is not specified.
struct BevGeometry {
    std::uint32_t n_range = 256;
    std::uint32_t n_azimuth = 512;
    float range_res = 0.04f;
    float fov = 3.14159265358979323846f;
};

/// Coherently average chirps, window (Hann by default) and DFT each rx
/// channel over the sample axis. Output is [rx][range_bin] with n_samples
/// range bins; downstream keeps only the first n_range of them.
ComplexMat range_fft(const IqFrame& frame, RangeWindow window = RangeWindow::Hann);

/// Per range bin, zero-pad the rx vector to n_azimuth, DFT across channels
/// and FFT-shift so azimuth bin 0 corresponds to -fov/2. Output is
/// [range_bin][azimuth_bin]. n_azimuth must be a power of two >= n_rx.
ComplexMat azimuth_fft(const ComplexMat& range_spectrum, std::uint32_t n_azimuth);

/// Magnitude image normalized by the per-frame maximum to [0,1]; all-zero
/// input stays all-zero. If n_range > 0, only the first n_range rows of
/// the spectrum are kept; n_range = 0 keeps all rows.
PolarBev to_polar_bev(const ComplexMat& az_spectrum, float range_res, float fov,
                      std::uint32_t n_range = 0);

/// Zero every cell below fraction * max(values); the paper's light static
/// threshold is fraction = 0.05 and fraction = 0 is the zero-threshold
/// ablation input.
PolarBev light_threshold(const PolarBev& bev, float fraction = 0.05f);

/// Full pipeline: range FFT, azimuth FFT, normalize, threshold.
PolarBev process_frame(const IqFrame& frame, const BevGeometry& geom,
                       float threshold_fraction = 0.05f,
                       RangeWindow window = RangeWindow::Hann);

}  // namespace rbev
