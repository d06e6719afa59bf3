#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "radarbev/errors.hpp"

namespace rbev {

/// One radar capture: complex I/Q samples per chirp per virtual receive
/// channel, stored [chirp][rx][sample] row-major.
struct IqFrame {
    std::uint32_t n_chirps = 0;
    std::uint32_t n_rx = 0;
    std::uint32_t n_samples = 0;
    std::vector<std::complex<float>> data;

    std::size_t expected_size() const {
        return std::size_t(n_chirps) * n_rx * n_samples;
    }
    const std::complex<float>& at(std::uint32_t chirp, std::uint32_t rx,
                                  std::uint32_t sample) const {
        return data[(std::size_t(chirp) * n_rx + rx) * n_samples + sample];
    }
    std::complex<float>& at(std::uint32_t chirp, std::uint32_t rx, std::uint32_t sample) {
        return data[(std::size_t(chirp) * n_rx + rx) * n_samples + sample];
    }
    void validate() const;
};

/// Range x azimuth magnitude image, values normalized to [0,1], row-major
/// with range as the row axis. Sensor at origin, boresight along +y,
/// azimuth bin 0 at -fov/2.
struct PolarBev {
    std::uint32_t n_range = 0;
    std::uint32_t n_azimuth = 0;
    float range_res = 0.0f;  // meters per range bin
    float fov = 0.0f;        // radians, symmetric about boresight
    std::vector<float> values;

    float at(std::uint32_t r, std::uint32_t a) const {
        return values[std::size_t(r) * n_azimuth + a];
    }
    float& at(std::uint32_t r, std::uint32_t a) {
        return values[std::size_t(r) * n_azimuth + a];
    }
    /// Polar coordinates of a cell center.
    double bin_range(std::uint32_t r) const { return (r + 0.5) * double(range_res); }
    double bin_azimuth(std::uint32_t a) const {
        return -0.5 * double(fov) + (a + 0.5) * double(fov) / n_azimuth;
    }
    void validate() const;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// Sparse set of (x, y) points in meters, sensor at origin facing +y.
struct PointCloud2D {
    std::vector<Point2> points;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

/// Display raster, sensor at bottom-center, row 0 at the top.
struct CartesianRaster {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    float cell_size = 0.0f;  // meters
    std::vector<float> values;

    float at(std::uint32_t row, std::uint32_t col) const {
        return values[std::size_t(row) * width + col];
    }
    float& at(std::uint32_t row, std::uint32_t col) {
        return values[std::size_t(row) * width + col];
    }
};

/// Dense C x H x W tensor, row-major within each channel.
template <typename T>
struct Tensor3 {
    std::uint32_t c = 0;
    std::uint32_t h = 0;
    std::uint32_t w = 0;
    std::vector<T> v;

    Tensor3() = default;
    Tensor3(std::uint32_t c_, std::uint32_t h_, std::uint32_t w_)
        : c(c_), h(h_), w(w_), v(std::size_t(c_) * h_ * w_, T(0)) {}

    std::size_t size() const { return v.size(); }
    T at(std::uint32_t ch, std::uint32_t y, std::uint32_t x) const {
        return v[(std::size_t(ch) * h + y) * w + x];
    }
    T& at(std::uint32_t ch, std::uint32_t y, std::uint32_t x) {
        return v[(std::size_t(ch) * h + y) * w + x];
    }
    bool same_shape(const Tensor3& o) const { return c == o.c && h == o.h && w == o.w; }
};

/// 4-channel compressed BEV representation (the codec latent; also holds
/// noisy latents and radar conditions).
using LatentTensor = Tensor3<float>;

inline void IqFrame::validate() const {
    if (n_chirps < 1) throw InvalidInput("IqFrame: n_chirps must be >= 1");
    if (n_rx < 2) throw InvalidInput("IqFrame: n_rx must be >= 2");
    if (n_samples < 16) throw InvalidInput("IqFrame: n_samples must be >= 16");
    if (data.size() != expected_size())
        throw ShapeMismatch("IqFrame: data length does not match dimensions");
    for (const auto& z : data) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw NonFiniteInput("IqFrame: non-finite sample");
    }
}

inline void PolarBev::validate() const {
    if (values.size() != std::size_t(n_range) * n_azimuth)
        throw ShapeMismatch("PolarBev: value count does not match dimensions");
    if (!(range_res > 0.0f)) throw InvalidInput("PolarBev: range_res must be > 0");
    if (!(fov > 0.0f) || fov > 3.14159275f)
        throw InvalidInput("PolarBev: fov must be in (0, pi]");
    for (float x : values) {
        if (!(x >= 0.0f && x <= 1.0f)) throw InvalidInput("PolarBev: value outside [0,1]");
    }
}

}  // namespace rbev
