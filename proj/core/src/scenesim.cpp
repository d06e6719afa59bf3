#include "radarbev/scenesim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>

#include "json.hpp"
#include "radarbev/errors.hpp"
#include "radarbev/io.hpp"
#include "radarbev/rng.hpp"

namespace rbev {

namespace {

double cross(const Point2& u, const Point2& v) { return u.x * v.y - u.y * v.x; }

void add_rect(std::vector<Segment>& walls, double x0, double y0, double x1, double y1) {
    walls.push_back({{x0, y0}, {x1, y0}});
    walls.push_back({{x1, y0}, {x1, y1}});
    walls.push_back({{x1, y1}, {x0, y1}});
    walls.push_back({{x0, y1}, {x0, y0}});
}

// Split an axis-aligned wall by a doorway of the given width starting at
// distance `pos` from endpoint a. Appends the two remaining pieces.
void add_wall_with_gaps(std::vector<Segment>& walls, Point2 a, Point2 b,
                        const std::vector<std::pair<double, double>>& gaps) {
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const Point2 dir{(b.x - a.x) / len, (b.y - a.y) / len};
    double cursor = 0.0;
    auto at = [&](double d) { return Point2{a.x + dir.x * d, a.y + dir.y * d}; };
    for (const auto& [pos, width] : gaps) {
        if (pos > cursor) walls.push_back({at(cursor), at(pos)});
        cursor = pos + width;
    }
    if (cursor < len) walls.push_back({at(cursor), at(len)});
}

}  // namespace

SceneSpec generate_scene(std::uint64_t seed) {
    Rng rng(Rng::derive(seed, 0x5ce9e));

    SceneSpec spec;
    spec.seed = seed;
    spec.half_width = rng.uniform(1.5, 2.5);
    spec.depth = rng.uniform(2.6, 4.2);
    spec.back = 0.3;

    // room boundary
    add_rect(spec.walls, -spec.half_width, -spec.back, spec.half_width, spec.depth);

    // internal walls; gaps are carved out of these
    const std::uint32_t n_walls = 1 + std::uint32_t(rng.below(3));  // 1..3
    const std::uint32_t n_gaps = 1 + std::uint32_t(rng.below(2));   // 1..2

    struct Pending {
        Point2 a, b;
        std::vector<std::pair<double, double>> gaps;  // (start, width)
        double len;
    };
    std::vector<Pending> pending;
    for (std::uint32_t i = 0; i < n_walls; ++i) {
        Pending p;
        const bool horizontal = rng.uniform() < 0.6;
        if (horizontal) {
            const double y = rng.uniform(0.8, spec.depth - 0.5);
            const double span = rng.uniform(1.7, 2.0 * spec.half_width - 0.2);
            const double x0 =
                rng.uniform(-spec.half_width + 0.1, spec.half_width - 0.1 - span);
            p.a = {x0, y};
            p.b = {x0 + span, y};
        } else {
            const double x = rng.uniform(-spec.half_width + 0.3, spec.half_width - 0.3);
            const double span = rng.uniform(1.7, std::max(1.75, spec.depth - 1.0));
            const double y0 = rng.uniform(0.5, std::max(0.55, spec.depth - 0.3 - span));
            p.a = {x, y0};
            p.b = {x, y0 + span};
        }
        p.len = std::hypot(p.b.x - p.a.x, p.b.y - p.a.y);
        pending.push_back(p);
    }
    for (std::uint32_t g = 0; g < n_gaps; ++g) {
        Pending& host = pending[rng.below(pending.size())];
        const double width = rng.uniform(0.7, std::min(1.2, host.len - 0.4));
        // place without overlapping an existing gap; a few tries, then skip
        for (int attempt = 0; attempt < 8; ++attempt) {
            const double pos = rng.uniform(0.1, host.len - width - 0.1);
            bool overlaps = false;
            for (const auto& [s, w] : host.gaps)
                if (pos < s + w && s < pos + width) overlaps = true;
            if (!overlaps) {
                host.gaps.push_back({pos, width});
                spec.gap_widths.push_back(width);
                break;
            }
        }
    }
    for (auto& p : pending) {
        std::sort(p.gaps.begin(), p.gaps.end());
        add_wall_with_gaps(spec.walls, p.a, p.b, p.gaps);
    }

    // convex obstacles (small boxes)
    spec.n_obstacles = std::uint32_t(rng.below(5));  // 0..4
    for (std::uint32_t i = 0; i < spec.n_obstacles; ++i) {
        const double w = rng.uniform(0.2, 0.55);
        const double h = rng.uniform(0.2, 0.55);
        const double cx = rng.uniform(-spec.half_width + 0.5, spec.half_width - 0.5);
        const double cy = rng.uniform(0.7, spec.depth - 0.6);
        add_rect(spec.walls, cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2);
    }
    return spec;
}

PolarBev lidar_bev(const SceneSpec& spec, const BevGeometry& geom) {
    PolarBev bev;
    bev.n_range = geom.n_range;
    bev.n_azimuth = geom.n_azimuth;
    bev.range_res = geom.range_res;
    bev.fov = geom.fov;
    bev.values.assign(std::size_t(geom.n_range) * geom.n_azimuth, 0.0f);

    const double max_range = double(geom.n_range) * geom.range_res;
    for (std::uint32_t a = 0; a < geom.n_azimuth; ++a) {
        const double theta = bev.bin_azimuth(a);
        const Point2 d{std::sin(theta), std::cos(theta)};
        double best = std::numeric_limits<double>::infinity();
        for (const auto& seg : spec.walls) {
            const Point2 s{seg.b.x - seg.a.x, seg.b.y - seg.a.y};
            const double den = cross(d, s);
            if (std::abs(den) < 1e-12) continue;
            const double t = cross(seg.a, s) / den;
            const double u = cross(seg.a, d) / den;
            if (t > 1e-9 && u >= 0.0 && u <= 1.0) best = std::min(best, t);
        }
        if (best < max_range) {
            const auto r = std::min(std::uint32_t(best / geom.range_res),
                                    geom.n_range - 1);
            bev.at(r, a) = 1.0f;
        }
    }
    return bev;
}

PolarBev radar_degrade(const PolarBev& gt, const DegradationConfig& cfg,
                       std::uint64_t seed) {
    const std::uint32_t R = gt.n_range, A = gt.n_azimuth;
    const double binw = double(gt.fov) / A;
    if (cfg.azimuth_psf_width != 0.0 && cfg.azimuth_psf_width <= binw)
        throw InvalidInput("radar_degrade: psf width must exceed azimuth bin width");

    Rng rng(Rng::derive(seed, 0xde67));
    std::vector<double> img(gt.values.begin(), gt.values.end());

    // azimuth blur: normalized sinc^2 beam pattern, truncated at two nulls
    if (cfg.azimuth_psf_width > 0.0) {
        const int K = int(std::ceil(2.0 * cfg.azimuth_psf_width / binw));
        std::vector<double> kern(2 * K + 1);
        double sum = 0.0;
        for (int k = -K; k <= K; ++k) {
            const double x = double(k) * binw / cfg.azimuth_psf_width;
            const double s = x == 0.0 ? 1.0
                                      : std::sin(std::numbers::pi * x) /
                                            (std::numbers::pi * x);
            kern[k + K] = s * s;
            sum += kern[k + K];
        }
        for (auto& v : kern) v /= sum;

        std::vector<double> row(A), rep(A);
        const bool replicas = cfg.sidelobe_gain_db > -99.0;
        const double gain = std::pow(10.0, cfg.sidelobe_gain_db / 20.0);
        const int off = int(std::lround(cfg.azimuth_psf_width / binw));
        for (std::uint32_t r = 0; r < R; ++r) {
            double* src = img.data() + std::size_t(r) * A;
            std::fill(row.begin(), row.end(), 0.0);
            for (std::uint32_t a = 0; a < A; ++a) {
                const double v = src[a];
                if (v == 0.0) continue;
                for (int k = -K; k <= K; ++k) {
                    const int j = int(a) + k;
                    if (j >= 0 && j < int(A)) row[j] += v * kern[k + K];
                }
            }
            if (replicas) {
                // first-null replicas model multipath-enhanced sidelobes
                for (std::uint32_t a = 0; a < A; ++a) {
                    double v = row[a];
                    if (int(a) - off >= 0) v += gain * row[a - off];
                    if (a + off < A) v += gain * row[a + off];
                    rep[a] = v;
                }
                std::copy(rep.begin(), rep.end(), src);
            } else {
                std::copy(row.begin(), row.end(), src);
            }
        }
    }

    // multiplicative speckle, blended toward unit mean
    if (cfg.speckle_scale > 0.0) {
        const double unit_sigma = std::sqrt(2.0 / std::numbers::pi);
        for (auto& v : img) {
            const double m = (1.0 - cfg.speckle_scale) +
                             cfg.speckle_scale * rng.rayleigh(unit_sigma);
            v *= m;
        }
    }

    // ghost returns: contiguous azimuth runs of first hits approximate
    // walls; each run may echo at a stretched range
    if (cfg.ghost_prob > 0.0) {
        std::vector<int> first_hit(A, -1);
        for (std::uint32_t a = 0; a < A; ++a)
            for (std::uint32_t r = 0; r < R; ++r)
                if (gt.at(r, a) >= 0.5f) {
                    first_hit[a] = int(r);
                    break;
                }
        std::uint32_t a = 0;
        while (a < A) {
            if (first_hit[a] < 0) {
                ++a;
                continue;
            }
            std::uint32_t run_end = a + 1;
            while (run_end < A && first_hit[run_end] >= 0 &&
                   std::abs(first_hit[run_end] - first_hit[run_end - 1]) <= 3)
                ++run_end;
            if (rng.uniform() < cfg.ghost_prob) {
                const double factor = rng.uniform(1.25, 1.75);
                const double amp = rng.uniform(0.4, 0.9);
                for (std::uint32_t j = a; j < run_end; ++j) {
                    const int gr = int(std::lround(first_hit[j] * factor));
                    if (gr < int(R))
                        img[std::size_t(gr) * A + j] += amp * gt.at(first_hit[j], j);
                }
            }
            a = run_end;
        }
    }

    if (cfg.dropout_prob > 0.0) {
        for (auto& v : img)
            if (rng.uniform() < cfg.dropout_prob) v = 0.0;
    }

    double max_v = 0.0;
    for (double v : img) max_v = std::max(max_v, v);
    PolarBev out;
    out.n_range = R;
    out.n_azimuth = A;
    out.range_res = gt.range_res;
    out.fov = gt.fov;
    out.values.resize(img.size());
    if (max_v > 0.0) {
        for (std::size_t i = 0; i < img.size(); ++i)
            out.values[i] = float(img[i] / max_v);
    }
    return light_threshold(out, float(cfg.threshold));
}

void generate_dataset(const std::string& out_dir, std::uint32_t n,
                      const BevGeometry& geom, const DegradationConfig& deg,
                      std::uint64_t seed) {
    namespace fs = std::filesystem;
    const fs::path pairs = fs::path(out_dir) / "pairs";
    fs::create_directories(pairs);

    nlohmann::json manifest;
    manifest["schema"] = 1;
    manifest["seed"] = seed;
    manifest["n"] = n;
    manifest["geometry"] = {{"n_range", geom.n_range},
                            {"n_azimuth", geom.n_azimuth},
                            {"range_res", geom.range_res},
                            {"fov", geom.fov}};
    manifest["degradation"] = {{"azimuth_psf_width", deg.azimuth_psf_width},
                               {"speckle_scale", deg.speckle_scale},
                               {"sidelobe_gain_db", deg.sidelobe_gain_db},
                               {"dropout_prob", deg.dropout_prob},
                               {"ghost_prob", deg.ghost_prob},
                               {"threshold", deg.threshold}};
    auto& entries = manifest["pairs"] = nlohmann::json::array();

    for (std::uint32_t i = 0; i < n; ++i) {
        const std::uint64_t pair_seed = Rng::derive(seed, i);
        const SceneSpec spec = generate_scene(pair_seed);
        const PolarBev gt = lidar_bev(spec, geom);
        const PolarBev radar = radar_degrade(gt, deg, pair_seed);

        char name[32];
        std::snprintf(name, sizeof(name), "%05u", i);
        write_rsbev((pairs / (std::string(name) + "_gt.rsbev")).string(), gt);
        write_rsbev((pairs / (std::string(name) + "_radar.rsbev")).string(), radar);
        entries.push_back({{"id", i}, {"seed", pair_seed}});
    }

    std::ofstream out(fs::path(out_dir) / "manifest.json");
    if (!out) throw IoError("cannot write manifest.json");
    out << manifest.dump(2) << "\n";
}

}  // namespace rbev
