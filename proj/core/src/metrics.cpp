#include "radarbev/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "radarbev/errors.hpp"

namespace rbev {

KdTree2D::KdTree2D(const std::vector<Point2>& pts) {
    std::vector<Point2> work = pts;
    nodes_.reserve(work.size());
    if (!work.empty()) root_ = build(work, 0, std::int32_t(work.size()), 0);
}

std::int32_t KdTree2D::build(std::vector<Point2>& pts, std::int32_t lo,
                             std::int32_t hi, int depth) {
    if (lo >= hi) return -1;
    const std::uint8_t axis = std::uint8_t(depth & 1);
    const std::int32_t mid = lo + (hi - lo) / 2;
    std::nth_element(pts.begin() + lo, pts.begin() + mid, pts.begin() + hi,
                     [axis](const Point2& a, const Point2& b) {
                         return axis == 0 ? a.x < b.x : a.y < b.y;
                     });
    Node node;
    node.p = pts[mid];
    node.axis = axis;
    const auto idx = std::int32_t(nodes_.size());
    nodes_.push_back(node);
    const std::int32_t l = build(pts, lo, mid, depth + 1);
    const std::int32_t r = build(pts, mid + 1, hi, depth + 1);
    nodes_[idx].left = l;
    nodes_[idx].right = r;
    return idx;
}

void KdTree2D::search(std::int32_t ni, const Point2& q, double& best) const {
    if (ni < 0) return;
    const Node& n = nodes_[ni];
    const double dx = q.x - n.p.x;
    const double dy = q.y - n.p.y;
    const double d = dx * dx + dy * dy;
    if (d < best) best = d;

    const double delta = n.axis == 0 ? dx : dy;
    const std::int32_t near = delta < 0 ? n.left : n.right;
    const std::int32_t far = delta < 0 ? n.right : n.left;
    search(near, q, best);
    if (delta * delta < best) search(far, q, best);
}

double KdTree2D::nearest_sq(const Point2& q) const {
    double best = std::numeric_limits<double>::infinity();
    search(root_, q, best);
    return best;
}

double directed_mean_nn(const PointCloud2D& a, const PointCloud2D& b) {
    if (a.empty() || b.empty())
        throw EmptyPointCloud("directed_mean_nn: empty point cloud");
    const KdTree2D tree(b.points);
    double sum = 0.0;
    for (const auto& p : a.points) sum += std::sqrt(tree.nearest_sq(p));
    return sum / double(a.points.size());
}

double chamfer(const PointCloud2D& a, const PointCloud2D& b, ChamferMode mode) {
    const double ab = directed_mean_nn(a, b);
    const double ba = directed_mean_nn(b, a);
    return mode == ChamferMode::MeanOfDirected ? 0.5 * (ab + ba) : ab + ba;
}

double modified_hausdorff(const PointCloud2D& a, const PointCloud2D& b, MhdMode mode) {
    const double ab = directed_mean_nn(a, b);
    const double ba = directed_mean_nn(b, a);
    return mode == MhdMode::MaxOfDirected ? std::max(ab, ba) : 0.5 * (ab + ba);
}

MetricResult evaluate_pair(const PointCloud2D& pred, const PointCloud2D& gt,
                           ChamferMode cd_mode, MhdMode mhd_mode) {
    MetricResult res;
    res.cd = chamfer(pred, gt, cd_mode);
    res.mhd = modified_hausdorff(pred, gt, mhd_mode);
    res.n_pred = pred.size();
    res.n_gt = gt.size();
    return res;
}

}  // namespace rbev
