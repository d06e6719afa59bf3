#pragma once

#include <string>
#include <utility>
#include <vector>

#include "radarbev/metrics.hpp"

namespace rbev {

struct CdfReportOptions {
    /// Draw the published full-scale reference marker lines. These
    /// constants come from the reference evaluation on the RadarHD test
    /// split and are NOT reproduced by this toolkit; they are labeled
    /// overlays only.
    bool paper_refs = false;
    double ref_cd = 0.35;        // m, reference system
    double ref_mhd = 0.28;       // m, reference system
    double ref_cfar_cd = 0.84;   // m, CFAR baseline reference
    double ref_cfar_mhd = 0.91;  // m, CFAR baseline reference
};

/// Per-frame metric table: frame_id, cd_m, mhd_m, n_pred, n_gt plus a
/// trailing mean summary row. Optional comment lines ('# ...') go above
/// the header (used for the labeled reference constants).
void write_metrics_csv(const std::string& path,
                       const std::vector<std::pair<std::string, MetricResult>>& rows,
                       const std::vector<std::string>& comments = {});

/// Empirical CDF tables (value, i/n) and 600x400 SVG line plots for CD and
/// MHD, written into out_dir as cdf_{cd,mhd}.{csv,svg}. Throws NoResults
/// when results is empty.
void cdf_report(const std::vector<MetricResult>& results, const std::string& out_dir,
                const CdfReportOptions& opt = {});

}  // namespace rbev
