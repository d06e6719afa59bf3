#include "radarbev/bevgrid.hpp"

#include <cmath>

#include "radarbev/errors.hpp"

namespace rbev {

PointCloud2D bev_to_points(const PolarBev& bev, double binarize_at) {
    if (!(binarize_at > 0.0 && binarize_at < 1.0))
        throw InvalidInput("bev_to_points: binarize_at must be in (0,1)");

    PointCloud2D pc;
    for (std::uint32_t r = 0; r < bev.n_range; ++r) {
        for (std::uint32_t a = 0; a < bev.n_azimuth; ++a) {
            if (bev.at(r, a) < binarize_at) continue;
            const double rho = bev.bin_range(r);
            const double theta = bev.bin_azimuth(a);
            pc.points.push_back({rho * std::sin(theta), rho * std::cos(theta)});
        }
    }
    return pc;
}

CartesianRaster points_to_cartesian(const PointCloud2D& pc, float cell_size,
                                    std::uint32_t width, std::uint32_t height) {
    if (!(cell_size > 0.0f))
        throw InvalidInput("points_to_cartesian: cell_size must be > 0");

    CartesianRaster raster;
    raster.width = width;
    raster.height = height;
    raster.cell_size = cell_size;
    raster.values.assign(std::size_t(width) * height, 0.0f);

    for (const auto& p : pc.points) {
        const double col = std::floor(p.x / cell_size + width / 2.0);
        const double row_up = std::floor(p.y / cell_size);  // rows above the origin
        if (col < 0 || col >= double(width) || row_up < 0 || row_up >= double(height))
            continue;
        const std::uint32_t r = height - 1 - std::uint32_t(row_up);
        raster.at(r, std::uint32_t(col)) = 1.0f;
    }
    return raster;
}

}  // namespace rbev
