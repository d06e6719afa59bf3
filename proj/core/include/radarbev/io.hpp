#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "radarbev/types.hpp"

namespace rbev {

// Binary container formats. All integers and floats are little-endian.
//
//   .rsiq   "RSIQ" u8 version=1, u32 n_chirps, n_rx, n_samples,
//           f32 (I,Q) pairs in [chirp][rx][sample] order
//   .rsbev  "RSBV" u8 version=1, u32 n_range, n_azimuth,
//           f32 range_res, f32 fov, f32 values row-major
//   .rslat  "RSLT" u32 c, h, w, f32 values
//   .rsckpt "RSCK" u8 version=1, u64 arch_hash, u32 T, f64 beta_start,
//           f64 beta_end, f32 latent_scale, u8 use_beta_variance,
//           u64 train_step, u32 n_params, f32 params[n], f32 adam_m[n],
//           f32 adam_v[n], u64 adam_step, u64 rng_state[4]

void write_rsiq(const std::string& path, const IqFrame& frame);
IqFrame read_rsiq(const std::string& path);

void write_rsbev(const std::string& path, const PolarBev& bev);
PolarBev read_rsbev(const std::string& path);

/// 8-bit binary PGM, value*255 rounded half-to-even, for visual checks.
void write_pgm(const std::string& path, const PolarBev& bev);
void write_pgm(const std::string& path, const CartesianRaster& raster);

void write_rslat(const std::string& path, const LatentTensor& z);
LatentTensor read_rslat(const std::string& path);

/// Everything needed to resume training bit-exactly or to sample without
/// the original config file.
struct Checkpoint {
    std::uint64_t arch_hash = 0;
    std::uint32_t T = 1000;
    double beta_start = 1e-4;
    double beta_end = 0.02;
    float latent_scale = 1.0f;
    bool use_beta_variance = false;
    std::uint64_t train_step = 0;
    std::vector<float> params;
    std::vector<float> adam_m, adam_v;
    std::uint64_t adam_step = 0;
    std::array<std::uint64_t, 4> rng_state{};
};

void write_rsckpt(const std::string& path, const Checkpoint& ckpt);
Checkpoint read_rsckpt(const std::string& path);

/// CSV with header "x_m,y_m", 6 decimal places.
void write_points_csv(const std::string& path, const PointCloud2D& pc);
PointCloud2D read_points_csv(const std::string& path);

/// ASCII PLY with float x, float y vertex properties.
void write_points_ply(const std::string& path, const PointCloud2D& pc);

}  // namespace rbev
