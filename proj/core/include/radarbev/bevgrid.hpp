#pragma once

#include <cstdint>

#include "radarbev/types.hpp"

namespace rbev {

/// Threshold a BEV at binarize_at and emit one point per surviving cell,
/// placed at the cell-center polar coordinates (same conversion as CFAR's
/// mask_to_points).
PointCloud2D bev_to_points(const PolarBev& bev, double binarize_at = 0.5);

/// Nearest-cell splat with value 1.0 onto a raster whose origin (the
/// sensor) sits at the bottom-center edge. Points outside the raster are
/// dropped; duplicate points light a cell once.
CartesianRaster points_to_cartesian(const PointCloud2D& pc, float cell_size,
                                    std::uint32_t width, std::uint32_t height);

}  // namespace rbev
