#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "json.hpp"
#include "radarbev/bevgrid.hpp"
#include "radarbev/errors.hpp"
#include "radarbev/metrics.hpp"
#include "radarbev/scenesim.hpp"

using namespace rbev;

namespace {

BevGeometry desk_geometry() {
    BevGeometry geom;
    geom.n_range = 64;
    geom.n_azimuth = 64;
    geom.range_res = 0.08f;
    geom.fov = 3.14159265358979323846f;
    return geom;
}

}  // namespace

TEST_CASE("generate_scene is deterministic and respects its constraints") {
    const SceneSpec a = generate_scene(12345);
    const SceneSpec b = generate_scene(12345);
    CHECK(a.walls.size() == b.walls.size());
    for (std::size_t i = 0; i < a.walls.size(); ++i) {
        CHECK(a.walls[i].a.x == b.walls[i].a.x);
        CHECK(a.walls[i].b.y == b.walls[i].b.y);
    }

    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const SceneSpec s = generate_scene(seed);
        const double eps = 1e-9;
        for (const auto& wall : s.walls) {
            CHECK(wall.a.x >= -s.half_width - eps);
            CHECK(wall.a.x <= s.half_width + eps);
            CHECK(wall.b.x >= -s.half_width - eps);
            CHECK(wall.b.x <= s.half_width + eps);
            CHECK(wall.a.y >= -s.back - eps);
            CHECK(wall.a.y <= s.depth + eps);
        }
        REQUIRE(!s.gap_widths.empty());
        for (const double g : s.gap_widths) {
            CHECK(g >= 0.7);
            CHECK(g <= 1.2);
        }
        CHECK(s.n_obstacles <= 4);
    }
}

TEST_CASE("lidar_bev renders first hits only") {
    const BevGeometry geom = desk_geometry();

    SUBCASE("empty scene gives an all-zero BEV") {
        SceneSpec empty;
        empty.half_width = 1.0;
        empty.depth = 1.0;
        const PolarBev bev = lidar_bev(empty, geom);
        for (float v : bev.values) CHECK(v == 0.0f);
    }

    SUBCASE("perpendicular wall at y=2 hits rows 49/50 near broadside") {
        BevGeometry fine = geom;
        fine.n_range = 128;
        fine.range_res = 0.04f;
        SceneSpec spec;
        spec.half_width = 3.0;
        spec.depth = 3.0;
        spec.walls.push_back({{-3.0, 2.0}, {3.0, 2.0}});
        const PolarBev bev = lidar_bev(spec, fine);
        // boresight-adjacent columns: theta = +-fov/(2*n_az)
        for (const std::uint32_t a : {31u, 32u}) {
            std::uint32_t hit = 0;
            bool found = false;
            for (std::uint32_t r = 0; r < fine.n_range; ++r)
                if (bev.at(r, a) == 1.0f) {
                    hit = r;
                    found = true;
                    break;
                }
            REQUIRE(found);
            // 2.0/0.04 = bin 50 at exact broadside, 49 or 50 with
            // bin-center obliquity
            CHECK(hit >= 49);
            CHECK(hit <= 50);
        }
    }

    SUBCASE("occluded wall produces no hits") {
        SceneSpec spec;
        spec.half_width = 3.0;
        spec.depth = 5.0;
        spec.walls.push_back({{-3.0, 1.0}, {3.0, 1.0}});  // near wall
        spec.walls.push_back({{-3.0, 2.5}, {3.0, 2.5}});  // fully occluded
        const PolarBev bev = lidar_bev(spec, desk_geometry());
        // within +-45 degrees the near wall stays below range 1.42 m, so
        // any echo near 2.5 m would have to come from the occluded wall
        const auto far_bin = std::uint32_t(2.5 / 0.08);
        for (std::uint32_t a = 16; a < 48; ++a)
            for (std::uint32_t r = far_bin - 2; r <= far_bin + 2; ++r)
                CHECK(bev.at(r, a) == 0.0f);
    }

    SUBCASE("one hit per column at most") {
        const SceneSpec spec = generate_scene(99);
        const PolarBev bev = lidar_bev(spec, geom);
        for (std::uint32_t a = 0; a < bev.n_azimuth; ++a) {
            int hits = 0;
            for (std::uint32_t r = 0; r < bev.n_range; ++r)
                if (bev.at(r, a) != 0.0f) ++hits;
            CHECK(hits <= 1);
        }
    }
}

TEST_CASE("radar_degrade: identity config passes a binary BEV through") {
    const SceneSpec spec = generate_scene(5);
    const PolarBev gt = lidar_bev(spec, desk_geometry());

    DegradationConfig off;
    off.azimuth_psf_width = 0.0;
    off.speckle_scale = 0.0;
    off.sidelobe_gain_db = -120.0;
    off.dropout_prob = 0.0;
    off.ghost_prob = 0.0;
    const PolarBev out = radar_degrade(gt, off, 1);
    CHECK(out.values == gt.values);
}

TEST_CASE("radar_degrade: single point spreads into the PSF shape") {
    const BevGeometry geom = desk_geometry();
    PolarBev gt;
    gt.n_range = geom.n_range;
    gt.n_azimuth = geom.n_azimuth;
    gt.range_res = geom.range_res;
    gt.fov = geom.fov;
    gt.values.assign(std::size_t(64) * 64, 0.0f);
    gt.at(30, 32) = 1.0f;

    DegradationConfig cfg;
    cfg.azimuth_psf_width = 0.2;
    cfg.speckle_scale = 0.0;
    cfg.sidelobe_gain_db = -120.0;  // replicas off: profile = pure PSF
    cfg.dropout_prob = 0.0;
    cfg.ghost_prob = 0.0;
    cfg.threshold = 0.0;
    const PolarBev out = radar_degrade(gt, cfg, 3);

    // direct convolution oracle: kernel sinc^2(delta/width), truncated at
    // two nulls, normalized, then renormalized by its max (peak at center)
    const double binw = double(geom.fov) / 64.0;
    const int K = int(std::ceil(2.0 * cfg.azimuth_psf_width / binw));
    std::vector<double> kern(2 * K + 1);
    double sum = 0.0;
    for (int k = -K; k <= K; ++k) {
        const double x = k * binw / cfg.azimuth_psf_width;
        const double s = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
        kern[k + K] = s * s;
        sum += kern[k + K];
    }
    for (auto& v : kern) v /= sum;
    const double peak = kern[K];

    for (int k = -K; k <= K; ++k) {
        const double want = kern[k + K] / peak;
        // profile equals the PSF up to the f32 storage rounding of the BEV
        const double tol = std::max(1e-10, want * 1.2e-7);
        CHECK(std::abs(double(out.at(30, 32 + k)) - want) < tol);
    }
}

TEST_CASE("radar_degrade is deterministic and strictly lossy") {
    const BevGeometry geom = desk_geometry();
    DegradationConfig cfg;  // defaults
    for (std::uint64_t seed : {1ull, 22ull, 333ull, 4444ull}) {
        const SceneSpec spec = generate_scene(seed);
        const PolarBev gt = lidar_bev(spec, geom);
        const PolarBev a = radar_degrade(gt, cfg, seed);
        const PolarBev b = radar_degrade(gt, cfg, seed);
        CHECK(a.values == b.values);

        const PointCloud2D pc_gt = bev_to_points(gt, 0.5);
        const PointCloud2D pc_deg = bev_to_points(a, 0.5);
        if (!pc_gt.empty() && !pc_deg.empty())
            CHECK(chamfer(pc_deg, pc_gt) > 0.0);
    }
}

TEST_CASE("degraded BEV keeps at least half of the occupied columns") {
    const BevGeometry geom = desk_geometry();
    DegradationConfig cfg;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const SceneSpec spec = generate_scene(seed);
        const PolarBev gt = lidar_bev(spec, geom);
        const PolarBev deg = radar_degrade(gt, cfg, seed);
        std::size_t gt_cols = 0, kept = 0;
        for (std::uint32_t a = 0; a < 64; ++a) {
            bool g = false, d = false;
            for (std::uint32_t r = 0; r < 64; ++r) {
                g = g || gt.at(r, a) != 0.0f;
                d = d || deg.at(r, a) != 0.0f;
            }
            gt_cols += g;
            kept += (g && d);
        }
        REQUIRE(gt_cols > 0);
        CHECK(double(kept) / double(gt_cols) >= 0.5);
    }
}

TEST_CASE("radar_degrade rejects a PSF narrower than a bin") {
    const PolarBev gt = lidar_bev(generate_scene(1), desk_geometry());
    DegradationConfig cfg;
    cfg.azimuth_psf_width = 0.01;  // < pi/64
    CHECK_THROWS_AS(radar_degrade(gt, cfg, 1), InvalidInput);
}

TEST_CASE("2000 desk-scale pairs generate in under a minute") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "rbev_ds_speed";
    fs::remove_all(dir);
    const auto t0 = std::chrono::steady_clock::now();
    generate_dataset(dir.string(), 2000, desk_geometry(), DegradationConfig{}, 3);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(elapsed < 60.0);
    CHECK(fs::exists(dir / "pairs" / "01999_gt.rsbev"));
    fs::remove_all(dir);
}

TEST_CASE("generate_dataset writes pairs and a manifest") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "rbev_ds_test";
    fs::remove_all(dir);

    generate_dataset(dir.string(), 5, desk_geometry(), DegradationConfig{}, 42);
    CHECK(fs::exists(dir / "pairs" / "00000_radar.rsbev"));
    CHECK(fs::exists(dir / "pairs" / "00004_gt.rsbev"));

    std::ifstream in(dir / "manifest.json");
    REQUIRE(in.good());
    nlohmann::json manifest;
    in >> manifest;
    CHECK(manifest["n"] == 5);
    CHECK(manifest["pairs"].size() == 5);
    CHECK(manifest["geometry"]["n_range"] == 64);
    fs::remove_all(dir);
}
