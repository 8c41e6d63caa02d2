#include "trajectory/bezier.hpp"

#include "common/error.hpp"

#include <string>

namespace flexmesh::trajectory {

std::array<double, 4> bernstein(double u)
{
    require(std::isfinite(u) && u >= 0.0 && u <= 1.0, ErrorCode::InvalidArgument,
            "Bernstein parameter " + std::to_string(u) + " outside [0, 1]");
    const double v = 1.0 - u;
    return {v * v * v, 3.0 * v * v * u, 3.0 * v * u * u, u * u * u};
}

double frame_time(int t, int frame_count)
{
    require(frame_count >= 2, ErrorCode::InvalidArgument, "trajectories need at least 2 frames");
    require(t >= 0 && t < frame_count, ErrorCode::IndexOutOfRange,
            "frame " + std::to_string(t) + " outside [0, " + std::to_string(frame_count) + ")");
    // exact endpoints: t = N-1 gives u = 1
    return static_cast<double>(t) / static_cast<double>(frame_count - 1);
}

void TrajectorySet::validate(const Positions& rest_keypoints) const
{
    require(frame_count >= 2, ErrorCode::InvalidArgument, "trajectories need at least 2 frames");
    require(rest_keypoints.rows() == keypoint_count(), ErrorCode::ShapeMismatch,
            "trajectory count does not match keypoint count");
    for (int i = 0; i < keypoint_count(); ++i) {
        const auto& c = control_points[static_cast<std::size_t>(i)];
        for (const auto& p : c)
            require(p.allFinite(), ErrorCode::NonFinite, "trajectory " + std::to_string(i) + " has non-finite control points");
        require(c[0] == rest_keypoints.row(i).transpose(), ErrorCode::InvalidArgument,
                "trajectory " + std::to_string(i) + " does not start at its rest keypoint");
    }
}

TrajectorySet TrajectorySet::stationary(const Positions& rest_keypoints, int frame_count)
{
    TrajectorySet out;
    out.frame_count = frame_count;
    for (Eigen::Index i = 0; i < rest_keypoints.rows(); ++i) {
        const Vec2 p = rest_keypoints.row(i).transpose();
        out.control_points.push_back({p, p, p, p});
    }
    return out;
}

Positions sample(const TrajectorySet& traj, int t)
{
    const auto b = bernstein(frame_time(t, traj.frame_count));
    Positions out(traj.keypoint_count(), 2);
    for (int i = 0; i < traj.keypoint_count(); ++i) {
        const auto& c = traj.control_points[static_cast<std::size_t>(i)];
        Vec2 p = Vec2::Zero();
        for (std::size_t j = 0; j < 4; ++j) p += b[j] * c[j];
        out.row(i) = p.transpose();
    }
    return out;
}

std::vector<ControlPoints> sample_gradient(const TrajectorySet& traj, int t, const Positions& grad_positions)
{
    require(grad_positions.rows() == traj.keypoint_count(), ErrorCode::ShapeMismatch,
            "position gradient does not match keypoint count");
    const auto b = bernstein(frame_time(t, traj.frame_count));
    std::vector<ControlPoints> out(static_cast<std::size_t>(traj.keypoint_count()));
    for (int i = 0; i < traj.keypoint_count(); ++i)
        for (std::size_t j = 0; j < 4; ++j)
            out[static_cast<std::size_t>(i)][j] = b[j] * grad_positions.row(i).transpose();
    return out;
}

} // namespace flexmesh::trajectory
