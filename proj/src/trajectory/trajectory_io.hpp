#pragma once

#include "trajectory/bezier.hpp"

#include <json.hpp>

#include <filesystem>

namespace flexmesh::trajectory {

// {"frame_count": N, "control_points": [[[x, y] x 4], ...]}, one entry per keypoint.

nlohmann::json trajectory_to_json(const TrajectorySet& traj);
TrajectorySet trajectory_from_json(const nlohmann::json& doc);

void save_trajectory(const TrajectorySet& traj, const std::filesystem::path& path);
TrajectorySet load_trajectory(const std::filesystem::path& path);

} // namespace flexmesh::trajectory
