#pragma once

#include "nn/mlp.hpp"
#include "trajectory/bezier.hpp"

namespace flexmesh::trajectory {

struct TrajectoryModelConfig
{
    int embedding_dim = 8;
    int hidden = 32;
    /// Offsets of c1..c3 are the MLP output times this factor (image widths).
    double motion_scale = 0.5;
};

struct TrajectoryTape
{
    nn::Matrix input;
    nn::MlpTape mlp;
};

/// 4-layer MLP mapping (rest keypoint, learned keypoint embedding) to the
/// offsets of control points c1..c3; c0 is pinned to the rest keypoint so
/// the first frame always reproduces the input.
///
/// Parameters: "traj.embed" (M x embedding_dim) and the MLP "traj.mlp".
class TrajectoryModel
{
public:
    explicit TrajectoryModel(TrajectoryModelConfig config = {});

    const TrajectoryModelConfig& config() const { return m_config; }
    const nn::Mlp& mlp() const { return m_mlp; }

    /// Final layer zero-initialized, so the initial trajectories are stationary.
    void init(nn::ParamStore& params, Rng& rng, int keypoint_count) const;

    TrajectorySet forward(const nn::ParamStore& params, const Positions& rest_keypoints, int frame_count,
                          TrajectoryTape* tape = nullptr) const;

    /// Accumulates dLoss/dparams given dLoss/dcontrol points.
    void backward(const nn::ParamStore& params, const TrajectoryTape& tape,
                  const std::vector<ControlPoints>& grad_control, nn::GradStore& grads) const;

private:
    TrajectoryModelConfig m_config;
    nn::Mlp m_mlp;
};

TrajectorySet parameterize_mlp(const TrajectoryModel& model, const Positions& rest_keypoints,
                               const nn::ParamStore& params, int frame_count);

} // namespace flexmesh::trajectory
