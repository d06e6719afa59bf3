#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radarbev/types.hpp"

namespace rbev {

/// How the two directed mean nearest-neighbor distances are combined.
/// The defaults follow the common conventions: Chamfer as the arithmetic
/// mean of both directions, MHD as their maximum (Dubuisson-Jain). The
/// alternates exist for cross-paper comparison.
enum class ChamferMode { MeanOfDirected, SumOfDirected };
enum class MhdMode { MaxOfDirected, MeanOfDirected };

struct MetricResult {
    double cd = 0.0;   // meters
    double mhd = 0.0;  // meters
    std::size_t n_pred = 0;
    std::size_t n_gt = 0;
};

/// Mean distance from each point of a to its nearest neighbor in b,
/// accelerated by a kd-tree. Exact: agrees with brute force to fp
/// rounding. Throws EmptyPointCloud if either cloud is empty.
double directed_mean_nn(const PointCloud2D& a, const PointCloud2D& b);

double chamfer(const PointCloud2D& a, const PointCloud2D& b,
               ChamferMode mode = ChamferMode::MeanOfDirected);

double modified_hausdorff(const PointCloud2D& a, const PointCloud2D& b,
                          MhdMode mode = MhdMode::MaxOfDirected);

MetricResult evaluate_pair(const PointCloud2D& pred, const PointCloud2D& gt,
                           ChamferMode cd_mode = ChamferMode::MeanOfDirected,
                           MhdMode mhd_mode = MhdMode::MaxOfDirected);

/// Static kd-tree over 2D points; exact nearest-neighbor queries.
class KdTree2D {
  public:
    explicit KdTree2D(const std::vector<Point2>& pts);

    /// Squared distance from q to the nearest stored point.
    double nearest_sq(const Point2& q) const;

  private:
    struct Node {
        Point2 p;
        std::int32_t left = -1;
        std::int32_t right = -1;
        std::uint8_t axis = 0;
    };
    std::int32_t build(std::vector<Point2>& pts, std::int32_t lo, std::int32_t hi,
                       int depth);
    void search(std::int32_t node, const Point2& q, double& best) const;
    std::vector<Node> nodes_;
    std::int32_t root_ = -1;
};

}  // namespace rbev
