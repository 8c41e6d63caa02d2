#include "trajectory/trajectory_mlp.hpp"

#include "common/error.hpp"
#include "common/rng.hpp"

#include <cmath>

namespace flexmesh::trajectory {

namespace {
constexpr const char* kEmbed = "traj.embed";
}

TrajectoryModel::TrajectoryModel(TrajectoryModelConfig config)
    : m_config(config)
    , m_mlp("traj.mlp", {2 + config.embedding_dim, config.hidden, config.hidden, config.hidden, 6})
{}

void TrajectoryModel::init(nn::ParamStore& params, Rng& rng, int keypoint_count) const
{
    require(keypoint_count >= 1, ErrorCode::InvalidArgument, "trajectory model needs at least one keypoint");
    nn::Matrix& e = params.create(kEmbed, keypoint_count, m_config.embedding_dim);
    for (Eigen::Index i = 0; i < e.size(); ++i) e.data()[i] = rng.uniform(-1.0, 1.0);
    m_mlp.init(params, rng, true);
}

TrajectorySet TrajectoryModel::forward(const nn::ParamStore& params, const Positions& rest_keypoints,
                                       int frame_count, TrajectoryTape* tape) const
{
    const nn::Matrix& embed = params.get(kEmbed);
    const Eigen::Index m = rest_keypoints.rows();
    require(embed.rows() == m && embed.cols() == m_config.embedding_dim, ErrorCode::ShapeMismatch,
            "keypoint embedding is " + std::to_string(embed.rows()) + "x" + std::to_string(embed.cols()) +
                ", expected " + std::to_string(m) + "x" + std::to_string(m_config.embedding_dim));

    nn::Matrix input(m, 2 + m_config.embedding_dim);
    input.leftCols(2) = rest_keypoints;
    input.rightCols(m_config.embedding_dim) = embed;

    nn::MlpTape local;
    const nn::Matrix out = m_mlp.forward(params, input, tape ? &tape->mlp : &local);
    if (tape) tape->input = input;

    TrajectorySet traj;
    traj.frame_count = frame_count;
    for (Eigen::Index i = 0; i < m; ++i) {
        const Vec2 rest = rest_keypoints.row(i).transpose();
        ControlPoints c;
        c[0] = rest;
        for (int j = 1; j < 4; ++j)
            c[static_cast<std::size_t>(j)] =
                rest + m_config.motion_scale * Vec2(out(i, 2 * (j - 1)), out(i, 2 * (j - 1) + 1));
        traj.control_points.push_back(c);
    }
    return traj;
}

void TrajectoryModel::backward(const nn::ParamStore& params, const TrajectoryTape& tape,
                               const std::vector<ControlPoints>& grad_control, nn::GradStore& grads) const
{
    const Eigen::Index m = tape.input.rows();
    require(static_cast<Eigen::Index>(grad_control.size()) == m, ErrorCode::ShapeMismatch,
            "control-point gradient does not match keypoint count");
    nn::Matrix gout(m, 6);
    for (Eigen::Index i = 0; i < m; ++i)
        for (int j = 1; j < 4; ++j) {
            const Vec2& g = grad_control[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            gout(i, 2 * (j - 1)) = m_config.motion_scale * g.x();
            gout(i, 2 * (j - 1) + 1) = m_config.motion_scale * g.y();
        }
    const nn::Matrix gin = m_mlp.backward(params, tape.mlp, gout, grads);
    grads.at(kEmbed, m, m_config.embedding_dim) += gin.rightCols(m_config.embedding_dim);
}

TrajectorySet parameterize_mlp(const TrajectoryModel& model, const Positions& rest_keypoints,
                               const nn::ParamStore& params, int frame_count)
{
    return model.forward(params, rest_keypoints, frame_count);
}

} // namespace flexmesh::trajectory
