#pragma once

#include "common/types.hpp"
#include "trajectory/bezier.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace flexmesh::metrics {

/// Per-frame keypoint positions p_t(i). Every frame has the same keypoint count.
struct MotionRecord
{
    std::vector<Positions> frames;

    int frame_count() const { return static_cast<int>(frames.size()); }
    int keypoint_count() const { return frames.empty() ? 0 : static_cast<int>(frames.front().rows()); }

    /// Throws on ragged or non-finite data.
    void validate() const;
};

enum class MotionSource
{
    Keypoints,     // sampled trajectory positions, one record frame per animation frame
    ControlPoints, // the four Bezier control points of each keypoint, as a 4-frame record
};

MotionRecord record_from_trajectories(const trajectory::TrajectorySet& traj, MotionSource source);

/// DS with inter-frame displacement d_t = p_t - p_{t-1} and d_0 = 0,
/// normalized by 1/((N-1) M). Needs N >= 3.
double deformation_smoothness(const MotionRecord& record);

/// AE = 1/(N M) sum_{t=1}^{N-1} sum_i |p_t - p_0|^2. Needs N >= 2.
double animation_energy(const MotionRecord& record);

struct MetricsReport
{
    double ds = 0;
    double ae = 0;
    std::vector<double> ds_per_keypoint;
    std::vector<double> ae_per_keypoint;
};

MetricsReport evaluate(const MotionRecord& record);

/// Columns: metric,keypoint,value. The aggregate row uses keypoint "all".
std::string report_csv(const MetricsReport& report);

/// {"frames": [[[x, y], ...], ...]}
MotionRecord load_record(const std::filesystem::path& path);
void save_record(const MotionRecord& record, const std::filesystem::path& path);

} // namespace flexmesh::metrics
