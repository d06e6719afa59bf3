#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radarbev/iqproc.hpp"
#include "radarbev/types.hpp"

namespace rbev {

struct Segment {
    Point2 a, b;
};

/// Procedurally generated room: rectangular boundary around the sensor
/// (origin, +y boresight), 1-3 internal walls carrying 1-2 doorway gaps,
/// and 0-4 convex obstacles. Fully determined by the seed.
struct SceneSpec {
    std::uint64_t seed = 0;
    double half_width = 0.0;  // room spans x in [-half_width, half_width]
    double depth = 0.0;       // front wall at y = depth
    double back = 0.0;        // back wall at y = -back (behind the sensor)
    std::vector<Segment> walls;      // boundary + internal walls + obstacles
    std::vector<double> gap_widths;  // carved doorway widths, meters
    std::uint32_t n_obstacles = 0;
};

SceneSpec generate_scene(std::uint64_t seed);

/// Ideal LiDAR scan rendered as a binary polar BEV: one ray per azimuth
/// bin center, first wall intersection lights the containing range bin.
PolarBev lidar_bev(const SceneSpec& spec, const BevGeometry& geom);

/// Forward model approximating single-frame radar artifacts on a clean
/// BEV. Parameters are physically motivated but declared, not fitted.
struct DegradationConfig {
    /// Beam first-null half-width in radians (sinc^2 pattern of a uniform
    /// aperture). 0 disables blur and sidelobe replicas; otherwise must
    /// exceed the azimuth bin width.
    double azimuth_psf_width = 0.20;
    /// Blend toward unit-mean Rayleigh speckle: 0 = off, 1 = full speckle.
    double speckle_scale = 0.7;
    /// Amplitude of the +-first-null sidelobe replicas; <= -99 disables.
    double sidelobe_gain_db = -7.0;
    double dropout_prob = 0.25;
    /// Probability that a wall-like azimuth run echoes a displaced ghost
    /// copy (range stretched 1.25-1.75x, amplitude 0.4-0.9).
    double ghost_prob = 0.5;
    /// Static threshold applied at the end (the paper-style light
    /// threshold); 0 produces the zero-threshold ablation input.
    double threshold = 0.05;
};

/// Degradation chain: sinc^2 azimuth blur, sidelobe replicas, speckle,
/// per-wall ghost returns, dropout, renormalize, light threshold.
/// Deterministic in (gt, cfg, seed).
PolarBev radar_degrade(const PolarBev& gt, const DegradationConfig& cfg,
                       std::uint64_t seed);

/// Generate n (radar, gt) pairs under out_dir/pairs plus manifest.json.
/// Pair i is generated from scene seed derive(seed, i); files are
/// NNNNN_radar.rsbev / NNNNN_gt.rsbev.
void generate_dataset(const std::string& out_dir, std::uint32_t n,
                      const BevGeometry& geom, const DegradationConfig& deg,
                      std::uint64_t seed);

}  // namespace rbev
