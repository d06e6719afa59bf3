#include "radarbev/cfar.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "radarbev/errors.hpp"

namespace rbev {

void CfarConfig::validate() const {
    if (train < 1) throw InvalidInput("CfarConfig: train must be >= 1");
    if (!std::isfinite(offset_db)) throw InvalidInput("CfarConfig: offset_db not finite");
    if (variant == CfarVariant::OS && !(os_rank > 0.0 && os_rank <= 1.0))
        throw InvalidInput("CfarConfig: os_rank must be in (0,1]");
}

std::size_t DetectionMask::count() const {
    std::size_t n = 0;
    for (auto h : hits) n += (h != 0);
    return n;
}

DetectionMask cfar_detect(const PolarBev& bev, const CfarConfig& cfg) {
    cfg.validate();
    const std::uint32_t half = cfg.guard + cfg.train;
    const std::uint32_t win = 2 * half + 1;
    if (win > bev.n_range || win > bev.n_azimuth)
        throw WindowTooLarge("cfar_detect: window does not fit inside BEV");

    DetectionMask mask;
    mask.n_range = bev.n_range;
    mask.n_azimuth = bev.n_azimuth;
    mask.hits.assign(std::size_t(bev.n_range) * bev.n_azimuth, 0);

    const double factor = std::pow(10.0, cfg.offset_db / 10.0);
    const int g = int(cfg.guard);
    const int h = int(half);

    std::vector<double> ring;
    ring.reserve(std::size_t(win) * win);

    for (std::uint32_t r = half; r + half < bev.n_range; ++r) {
        for (std::uint32_t a = half; a + half < bev.n_azimuth; ++a) {
            double noise = 0.0;
            switch (cfg.variant) {
                case CfarVariant::CA: {
                    double sum = 0.0;
                    std::size_t n = 0;
                    for (int dr = -h; dr <= h; ++dr) {
                        for (int da = -h; da <= h; ++da) {
                            if (std::abs(dr) <= g && std::abs(da) <= g) continue;
                            sum += bev.at(r + dr, a + da);
                            ++n;
                        }
                    }
                    noise = sum / double(n);
                    break;
                }
                case CfarVariant::SO:
                case CfarVariant::GO: {
                    // leading = cells before the test cell along range,
                    // trailing = after; same-row cells split by azimuth.
                    double lead = 0.0, trail = 0.0;
                    std::size_t nl = 0, nt = 0;
                    for (int dr = -h; dr <= h; ++dr) {
                        for (int da = -h; da <= h; ++da) {
                            if (std::abs(dr) <= g && std::abs(da) <= g) continue;
                            const double v = bev.at(r + dr, a + da);
                            const bool leading = dr < 0 || (dr == 0 && da < 0);
                            if (leading) {
                                lead += v;
                                ++nl;
                            } else {
                                trail += v;
                                ++nt;
                            }
                        }
                    }
                    lead /= double(nl);
                    trail /= double(nt);
                    noise = cfg.variant == CfarVariant::SO ? std::min(lead, trail)
                                                           : std::max(lead, trail);
                    break;
                }
                case CfarVariant::OS: {
                    ring.clear();
                    for (int dr = -h; dr <= h; ++dr) {
                        for (int da = -h; da <= h; ++da) {
                            if (std::abs(dr) <= g && std::abs(da) <= g) continue;
                            ring.push_back(bev.at(r + dr, a + da));
                        }
                    }
                    const std::size_t k =
                        std::size_t(std::ceil(cfg.os_rank * double(ring.size())));
                    const std::size_t idx = (k == 0 ? 0 : k - 1);
                    std::nth_element(ring.begin(), ring.begin() + idx, ring.end());
                    noise = ring[idx];
                    break;
                }
            }
            if (bev.at(r, a) > noise * factor)
                mask.hits[std::size_t(r) * bev.n_azimuth + a] = 1;
        }
    }
    return mask;
}

PointCloud2D mask_to_points(const DetectionMask& mask, const PolarBev& bev) {
    if (mask.n_range != bev.n_range || mask.n_azimuth != bev.n_azimuth)
        throw ShapeMismatch("mask_to_points: mask and BEV shapes differ");

    PointCloud2D pc;
    for (std::uint32_t r = 0; r < mask.n_range; ++r) {
        for (std::uint32_t a = 0; a < mask.n_azimuth; ++a) {
            if (!mask.at(r, a)) continue;
            const double rho = bev.bin_range(r);
            const double theta = bev.bin_azimuth(a);
            pc.points.push_back({rho * std::sin(theta), rho * std::cos(theta)});
        }
    }
    return pc;
}

}  // namespace rbev
