#pragma once

#include "common/types.hpp"

#include <array>
#include <vector>

namespace flexmesh::trajectory {

using ControlPoints = std::array<Vec2, 4>;

/// Cubic Bezier trajectories, one per keypoint, sampled at N frames with
/// normalized time u_t = t / (N - 1).
struct TrajectorySet
{
    std::vector<ControlPoints> control_points;
    int frame_count = 24;

    int keypoint_count() const { return static_cast<int>(control_points.size()); }

    /// Throws unless frame_count >= 2, every point is finite and c0 of each
    /// curve equals the matching rest keypoint.
    void validate(const Positions& rest_keypoints) const;

    /// All four control points at the rest position: no motion.
    static TrajectorySet stationary(const Positions& rest_keypoints, int frame_count);
};

/// Bernstein basis B_j(u) = C(3, j) (1-u)^(3-j) u^j for u in [0, 1].
std::array<double, 4> bernstein(double u);

double frame_time(int t, int frame_count);

/// p_t(i) = sum_j B_j(u_t) c_j(i), one row per keypoint.
Positions sample(const TrajectorySet& traj, int t);

/// dLoss/dc_j(i) = B_j(u_t) dLoss/dp_t(i).
std::vector<ControlPoints> sample_gradient(const TrajectorySet& traj, int t, const Positions& grad_positions);

} // namespace flexmesh::trajectory
