#include "trajectory/trajectory_io.hpp"

#include "common/error.hpp"
#include "common/json_util.hpp"

namespace flexmesh::trajectory {

nlohmann::json trajectory_to_json(const TrajectorySet& traj)
{
    nlohmann::json doc;
    doc["frame_count"] = traj.frame_count;
    auto curves = nlohmann::json::array();
    for (const auto& c : traj.control_points) {
        auto pts = nlohmann::json::array();
        for (const auto& p : c) pts.push_back({p.x(), p.y()});
        curves.push_back(std::move(pts));
    }
    doc["control_points"] = std::move(curves);
    return doc;
}

TrajectorySet trajectory_from_json(const nlohmann::json& doc)
{
    if (!doc.is_object() || !doc.contains("frame_count") || !doc.contains("control_points"))
        fail(ErrorCode::Parse, "trajectory document needs \"frame_count\" and \"control_points\"");
    if (!doc["frame_count"].is_number_integer()) fail(ErrorCode::Parse, "frame_count must be an integer");
    TrajectorySet traj;
    traj.frame_count = doc["frame_count"].get<int>();
    require(traj.frame_count >= 2, ErrorCode::InvalidArgument, "frame_count must be >= 2");
    const auto& curves = doc["control_points"];
    if (!curves.is_array()) fail(ErrorCode::Parse, "control_points must be an array");
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const Positions p = json_util::points(curves[i], "control_points[" + std::to_string(i) + "]");
        if (p.rows() != 4) fail(ErrorCode::Parse, "control_points[" + std::to_string(i) + "] must hold 4 points");
        traj.control_points.push_back({p.row(0).transpose(), p.row(1).transpose(), p.row(2).transpose(),
                                       p.row(3).transpose()});
    }
    return traj;
}

void save_trajectory(const TrajectorySet& traj, const std::filesystem::path& path)
{
    json_util::write_file(path, trajectory_to_json(traj));
}

TrajectorySet load_trajectory(const std::filesystem::path& path)
{
    return trajectory_from_json(json_util::read_file(path));
}

} // namespace flexmesh::trajectory
