#pragma once

#include <cstdint>
#include <vector>

#include "radarbev/types.hpp"

namespace rbev {

enum class CfarVariant { CA, SO, GO, OS };

struct CfarConfig {
    std::uint32_t guard = 2;  // cells per side per axis
    std::uint32_t train = 8;  // cells per side per axis
    double offset_db = 5.0;
    CfarVariant variant = CfarVariant::CA;
    double os_rank = 0.75;  // (0,1], OS variant only

    void validate() const;
};

/// Boolean detection image with the shape of its source BEV.
struct DetectionMask {
    std::uint32_t n_range = 0;
    std::uint32_t n_azimuth = 0;
    std::vector<std::uint8_t> hits;

    bool at(std::uint32_t r, std::uint32_t a) const {
        return hits[std::size_t(r) * n_azimuth + a] != 0;
    }
    std::size_t count() const;
};

/// Sliding-window CFAR over linear magnitudes. A cell is detected iff its
/// value exceeds the local noise estimate times 10^(offset_db/10). The
/// noise estimate comes from the square training ring (guard ring
/// excluded): CA averages it, SO/GO take the min/max of the leading and
/// trailing half-ring means (split along the range axis, ties split by
/// azimuth), OS takes the ceil(os_rank*K)-th order statistic. Cells whose
/// window overruns the BEV border are never detected.
DetectionMask cfar_detect(const PolarBev& bev, const CfarConfig& cfg);

/// Convert detected cells to metric points at cell centers:
/// x = rho*sin(theta), y = rho*cos(theta).
PointCloud2D mask_to_points(const DetectionMask& mask, const PolarBev& bev);

}  // namespace rbev
