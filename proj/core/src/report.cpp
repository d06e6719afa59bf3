#include "radarbev/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "radarbev/errors.hpp"

namespace rbev {

namespace {

std::string fmt(double v, int prec = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
    return buf;
}

void write_cdf_csv(const std::string& path, const std::vector<double>& sorted) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "value_m,cdf\n";
    const double n = double(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i)
        out << fmt(sorted[i]) << "," << fmt(double(i + 1) / n) << "\n";
}

// 600x400 plot with a 60px left / 40px bottom margin for axis labels.
void write_cdf_svg(const std::string& path, const std::vector<double>& sorted,
                   const std::string& metric_label, bool draw_refs, double ref_ours,
                   double ref_cfar) {
    const double width = 600, height = 400;
    const double x0 = 60, y0 = height - 40;   // plot origin (bottom-left)
    const double x1 = width - 20, y1 = 20;    // top-right
    double vmax = sorted.back();
    if (draw_refs) vmax = std::max({vmax, ref_ours, ref_cfar});
    if (vmax <= 0.0) vmax = 1.0;
    vmax *= 1.05;

    const auto px = [&](double v) { return x0 + (x1 - x0) * v / vmax; };
    const auto py = [&](double p) { return y0 - (y0 - y1) * p; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"400\" "
           "viewBox=\"0 0 600 400\">\n";
    svg << "<rect width=\"600\" height=\"400\" fill=\"white\"/>\n";
    // axes
    svg << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\""
        << y0 << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\""
        << y1 << "\" stroke=\"black\"/>\n";
    // x ticks
    for (int i = 0; i <= 4; ++i) {
        const double v = vmax * i / 4.0;
        svg << "<line x1=\"" << px(v) << "\" y1=\"" << y0 << "\" x2=\"" << px(v)
            << "\" y2=\"" << y0 + 5 << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << px(v) << "\" y=\"" << y0 + 18
            << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(v, 2) << "</text>\n";
    }
    // y ticks
    for (int i = 0; i <= 4; ++i) {
        const double p = i / 4.0;
        svg << "<line x1=\"" << x0 - 5 << "\" y1=\"" << py(p) << "\" x2=\"" << x0
            << "\" y2=\"" << py(p) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << x0 - 8 << "\" y=\"" << py(p) + 4
            << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(p, 2) << "</text>\n";
    }
    svg << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << height - 8
        << "\" font-size=\"13\" text-anchor=\"middle\">" << metric_label
        << " [m]</text>\n";
    svg << "<text x=\"14\" y=\"" << (y0 + y1) / 2
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
        << (y0 + y1) / 2 << ")\">CDF</text>\n";

    // empirical CDF as a step-ish polyline through (v_i, i/n)
    svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    svg << px(0.0) << "," << py(0.0) << " ";
    const double n = double(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i)
        svg << px(sorted[i]) << "," << py(double(i + 1) / n) << " ";
    svg << "\"/>\n";

    if (draw_refs) {
        // labeled reference constants from the published full-scale study;
        // not produced by this run.
        svg << "<line x1=\"" << px(ref_ours) << "\" y1=\"" << y0 << "\" x2=\""
            << px(ref_ours) << "\" y2=\"" << y1
            << "\" stroke=\"#2ca02c\" stroke-dasharray=\"5,3\"/>\n";
        svg << "<text x=\"" << px(ref_ours) + 3 << "\" y=\"" << y1 + 12
            << "\" font-size=\"10\" fill=\"#2ca02c\">reference " << fmt(ref_ours, 2)
            << " m (full-scale, not reproduced)</text>\n";
        svg << "<line x1=\"" << px(ref_cfar) << "\" y1=\"" << y0 << "\" x2=\""
            << px(ref_cfar) << "\" y2=\"" << y1
            << "\" stroke=\"#d62728\" stroke-dasharray=\"5,3\"/>\n";
        svg << "<text x=\"" << px(ref_cfar) + 3 << "\" y=\"" << y1 + 26
            << "\" font-size=\"10\" fill=\"#d62728\">CFAR reference " << fmt(ref_cfar, 2)
            << " m (full-scale, not reproduced)</text>\n";
    }
    svg << "</svg>\n";

    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << svg.str();
}

}  // namespace

void write_metrics_csv(const std::string& path,
                       const std::vector<std::pair<std::string, MetricResult>>& rows,
                       const std::vector<std::string>& comments) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    for (const auto& c : comments) out << "# " << c << "\n";
    out << "frame_id,cd_m,mhd_m,n_pred,n_gt\n";
    double cd_sum = 0.0, mhd_sum = 0.0;
    for (const auto& [id, r] : rows) {
        out << id << "," << fmt(r.cd) << "," << fmt(r.mhd) << "," << r.n_pred << ","
            << r.n_gt << "\n";
        cd_sum += r.cd;
        mhd_sum += r.mhd;
    }
    if (!rows.empty()) {
        const double n = double(rows.size());
        out << "mean," << fmt(cd_sum / n) << "," << fmt(mhd_sum / n) << ",,\n";
    }
}

void cdf_report(const std::vector<MetricResult>& results, const std::string& out_dir,
                const CdfReportOptions& opt) {
    if (results.empty()) throw NoResults("cdf_report: no results");
    std::filesystem::create_directories(out_dir);

    std::vector<double> cd, mhd;
    cd.reserve(results.size());
    mhd.reserve(results.size());
    for (const auto& r : results) {
        cd.push_back(r.cd);
        mhd.push_back(r.mhd);
    }
    std::sort(cd.begin(), cd.end());
    std::sort(mhd.begin(), mhd.end());

    const auto dir = std::filesystem::path(out_dir);
    write_cdf_csv((dir / "cdf_cd.csv").string(), cd);
    write_cdf_csv((dir / "cdf_mhd.csv").string(), mhd);
    write_cdf_svg((dir / "cdf_cd.svg").string(), cd, "CD", opt.paper_refs, opt.ref_cd,
                  opt.ref_cfar_cd);
    write_cdf_svg((dir / "cdf_mhd.svg").string(), mhd, "MHD", opt.paper_refs,
                  opt.ref_mhd, opt.ref_cfar_mhd);
}

}  // namespace rbev
