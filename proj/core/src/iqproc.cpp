#include "radarbev/iqproc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "radarbev/errors.hpp"
#include "radarbev/fft.hpp"

namespace rbev {

ComplexMat range_fft(const IqFrame& frame, RangeWindow window) {
    frame.validate();

    const std::uint32_t n_rx = frame.n_rx;
    const std::uint32_t n = frame.n_samples;

    // Hann over the sample axis; rectangular on request (test mode and
    // sidelobe-preserving experiments).
    std::vector<double> win(n, 1.0);
    if (window == RangeWindow::Hann) {
        for (std::uint32_t i = 0; i < n; ++i)
            win[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (n - 1));
    }

    ComplexMat out(n_rx, n);
    std::vector<cplx> line(n);
    const double inv_chirps = 1.0 / double(frame.n_chirps);
    for (std::uint32_t rx = 0; rx < n_rx; ++rx) {
        // coherent mean over the chirp axis raises SNR without Doppler
        // processing; the pipeline stays single-frame.
        for (std::uint32_t s = 0; s < n; ++s) {
            cplx acc(0.0, 0.0);
            for (std::uint32_t ch = 0; ch < frame.n_chirps; ++ch) {
                const auto& z = frame.at(ch, rx, s);
                acc += cplx(z.real(), z.imag());
            }
            line[s] = acc * inv_chirps * win[s];
        }
        fft(line);
        for (std::uint32_t s = 0; s < n; ++s) out.at(rx, s) = line[s];
    }
    return out;
}

ComplexMat azimuth_fft(const ComplexMat& range_spectrum, std::uint32_t n_azimuth) {
    const std::uint32_t n_rx = range_spectrum.rows;
    const std::uint32_t n_bins = range_spectrum.cols;
    if (n_azimuth < n_rx)
        throw BadAzimuthSize("azimuth_fft: n_azimuth must be >= n_rx");
    if (!is_power_of_two(n_azimuth))
        throw BadAzimuthSize("azimuth_fft: n_azimuth must be a power of two");

    ComplexMat out(n_bins, n_azimuth);
    std::vector<cplx> line(n_azimuth);
    for (std::uint32_t r = 0; r < n_bins; ++r) {
        std::fill(line.begin(), line.end(), cplx(0.0, 0.0));
        for (std::uint32_t rx = 0; rx < n_rx; ++rx) line[rx] = range_spectrum.at(rx, r);
        fft(line);
        fftshift(line);
        for (std::uint32_t a = 0; a < n_azimuth; ++a) out.at(r, a) = line[a];
    }
    return out;
}

PolarBev to_polar_bev(const ComplexMat& az_spectrum, float range_res, float fov,
                      std::uint32_t n_range) {
    if (n_range == 0 || n_range > az_spectrum.rows) n_range = az_spectrum.rows;

    PolarBev bev;
    bev.n_range = n_range;
    bev.n_azimuth = az_spectrum.cols;
    bev.range_res = range_res;
    bev.fov = fov;
    bev.values.resize(std::size_t(n_range) * az_spectrum.cols);

    double max_mag = 0.0;
    std::vector<double> mag(bev.values.size());
    for (std::uint32_t r = 0; r < n_range; ++r) {
        for (std::uint32_t a = 0; a < az_spectrum.cols; ++a) {
            const cplx z = az_spectrum.at(r, a);
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw NonFiniteInput("to_polar_bev: non-finite spectrum value");
            const double m = std::abs(z);
            mag[std::size_t(r) * az_spectrum.cols + a] = m;
            max_mag = std::max(max_mag, m);
        }
    }
    if (max_mag == 0.0) {
        std::fill(bev.values.begin(), bev.values.end(), 0.0f);
        return bev;
    }
    const double inv = 1.0 / max_mag;
    for (std::size_t i = 0; i < mag.size(); ++i)
        bev.values[i] = float(mag[i] * inv);
    return bev;
}

PolarBev light_threshold(const PolarBev& bev, float fraction) {
    if (!(fraction >= 0.0f && fraction < 1.0f))
        throw BadFraction("light_threshold: fraction must be in [0,1)");

    PolarBev out = bev;
    if (fraction == 0.0f) return out;
    float max_v = 0.0f;
    for (float x : out.values) max_v = std::max(max_v, x);
    const float cut = fraction * max_v;
    for (float& x : out.values)
        if (x < cut) x = 0.0f;
    return out;
}

PolarBev process_frame(const IqFrame& frame, const BevGeometry& geom,
                       float threshold_fraction, RangeWindow window) {
    const ComplexMat rs = range_fft(frame, window);
    const ComplexMat az = azimuth_fft(rs, geom.n_azimuth);
    PolarBev bev = to_polar_bev(az, geom.range_res, geom.fov, geom.n_range);
    return light_threshold(bev, threshold_fraction);
}

}  // namespace rbev
