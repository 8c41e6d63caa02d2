#include "pipeline/animator.hpp"

#include "common/error.hpp"
#include "render/warp.hpp"
#include "trajectory/bezier.hpp"

namespace flexmesh::pipeline {

using guidance::FrameStack;
using mesh::JacobianField;

Scene Scene::build(mesh::TriMesh mesh, render::RasterImage image, JacobianField rest_jacobians,
                   double constraint_weight)
{
    require(!image.empty(), ErrorCode::InvalidArgument, "scene image is empty");
    require(static_cast<int>(rest_jacobians.size()) == mesh.face_count(), ErrorCode::ShapeMismatch,
            "rest Jacobians cover " + std::to_string(rest_jacobians.size()) + " faces, mesh has " +
                std::to_string(mesh.face_count()));
    Scene s;
    s.ops = std::make_shared<const mesh::DifferentialOperators>(mesh);
    s.system = std::make_shared<const deform::FactorizedSystem>(deform::assemble(s.ops, constraint_weight));
    s.rest_jacobians = std::move(rest_jacobians);
    s.image = std::move(image);
    return s;
}

std::vector<Positions> pose_trajectory(const Scene& scene, const trajectory::TrajectorySet& traj)
{
    std::vector<Positions> out;
    for (int t = 0; t < traj.frame_count; ++t)
        out.push_back(deform::solve(*scene.system, scene.rest_jacobians,
                                    {trajectory::sample(traj, t), scene.system->weight()}));
    return out;
}

std::vector<render::RasterImage> render_frames(const Scene& scene, const std::vector<Positions>& vertices, int width,
                                               int height)
{
    std::vector<render::RasterImage> frames;
    for (const auto& v : vertices) frames.push_back(render::warp(scene.image, scene.mesh(), v, width, height));
    return frames;
}

guidance::FrameStack render_stack(const Scene& scene, const std::vector<Positions>& vertices, int width, int height)
{
    require(!vertices.empty(), ErrorCode::InvalidArgument, "nothing to render");
    const auto frames = render_frames(scene, vertices, width, height);
    const Eigen::Index per = static_cast<Eigen::Index>(frames.front().size());
    Eigen::VectorXd data(per * static_cast<Eigen::Index>(frames.size()));
    for (std::size_t t = 0; t < frames.size(); ++t)
        data.segment(static_cast<Eigen::Index>(t) * per, per) =
            Eigen::Map<const Eigen::VectorXd>(frames[t].data().data(), per);
    return FrameStack({static_cast<int>(frames.size()), height, width, render::RasterImage::kChannels},
                      std::move(data));
}

namespace {

render::RasterImage frame_image(const FrameStack& stack, const Eigen::VectorXd& grad, int t)
{
    render::RasterImage img(stack.shape[2], stack.shape[1]);
    Eigen::Map<Eigen::VectorXd>(img.data().data(), stack.frame_size()) = grad.segment(t * stack.frame_size(),
                                                                                       stack.frame_size());
    return img;
}

} // namespace

Animator::Animator(Scene scene, AnimatorOptions options)
    : m_scene(std::move(scene))
    , m_options(std::move(options))
    , m_traj_model(m_options.trajectory)
    , m_temporal_model(m_options.temporal)
    , m_sds_rng(Rng(m_options.seed).split("sds"))
    , m_flow_rng(Rng(m_options.seed).split("flow"))
{
    require(m_options.frames >= 3, ErrorCode::InvalidArgument, "animation needs at least 3 frames");
    require(m_options.render_width > 0 && m_options.render_height > 0, ErrorCode::InvalidArgument,
            "render size must be positive");
    m_options.guidance.validate();
    Rng init = Rng(m_options.seed).split("init");
    Rng traj_rng = init.split("trajectory");
    Rng temporal_rng = init.split("temporal");
    m_traj_model.init(m_params, traj_rng, m_scene.mesh().keypoint_count());
    m_temporal_model.init(m_params, temporal_rng);
}

trajectory::TrajectorySet Animator::trajectory() const
{
    return m_traj_model.forward(m_params, m_scene.mesh().keypoint_positions(), m_options.frames);
}

ForwardPass Animator::forward() const
{
    ForwardPass fp;
    const auto& ops = *m_scene.ops;
    const auto& sys = *m_scene.system;
    fp.trajectory = m_traj_model.forward(m_params, m_scene.mesh().keypoint_positions(), m_options.frames,
                                         &fp.trajectory_tape);
    std::vector<JacobianField> spatial;
    for (int t = 0; t < m_options.frames; ++t) {
        fp.targets.push_back(trajectory::sample(fp.trajectory, t));
        fp.posed.push_back(deform::solve(sys, m_scene.rest_jacobians, {fp.targets.back(), sys.weight()}));
        spatial.push_back(ops.jacobians(fp.posed.back()));
    }
    fp.state = temporal::TemporalState::from_spatial(std::move(spatial), m_options.temporal.window);
    m_temporal_model.integrate(fp.state, m_params, &fp.temporal_tape);
    for (int t = 0; t < m_options.frames; ++t) {
        fp.total.push_back(temporal::total_jacobian(fp.state, t));
        const deform::KeypointConstraint c{fp.targets[static_cast<std::size_t>(t)], sys.weight()};
        fp.spatial_vertices.push_back(deform::solve(sys, fp.state.spatial[static_cast<std::size_t>(t)], c));
        fp.total_vertices.push_back(deform::solve(sys, fp.total.back(), c));
    }
    return fp;
}

StepLog Animator::evaluate(const guidance::ScoreOracle& oracle, nn::GradStore& grads, Rng& sds_rng,
                           Rng& flow_rng) const
{
    const auto& ops = *m_scene.ops;
    const auto& sys = *m_scene.system;
    const auto& cfg = m_options.guidance;
    const int n = m_options.frames;
    const int w = m_options.render_width;
    const int h = m_options.render_height;

    const ForwardPass fp = forward();
    const FrameStack x_total = render_stack(m_scene, fp.total_vertices, w, h);
    const FrameStack x_spatial = render_stack(m_scene, fp.spatial_vertices, w, h);

    const auto sds = guidance::sds_gradient(x_total, oracle, cfg, sds_rng);
    const auto flow = guidance::flow_matching_loss(x_total, x_spatial, fp.total, fp.state.spatial, oracle, cfg, flow_rng);

    StepLog log;
    log.sds = sds.loss;
    log.flow = flow.loss;
    log.total = guidance::total_loss(sds.loss, flow.loss, cfg.lambda);

    const Eigen::VectorXd g_total = sds.gradient + cfg.lambda * flow.grad_total;
    const Eigen::VectorXd g_spatial = cfg.lambda * flow.grad_spatial;

    std::vector<JacobianField> grad_temporal;
    std::vector<JacobianField> grad_spatial_jac;
    std::vector<Positions> grad_targets;
    for (int t = 0; t < n; ++t) {
        const auto ts = static_cast<std::size_t>(t);
        const Positions gv_total =
            render::warp_gradient(m_scene.image, m_scene.mesh(), fp.total_vertices[ts], frame_image(x_total, g_total, t));
        const auto adj_total = deform::solve_adjoint(sys, gv_total);
        JacobianField dj = adj_total.jacobian + cfg.lambda * flow.grad_jacobians[ts];

        JacobianField djp = dj + cfg.lambda * flow.grad_spatial_jacobians[ts];
        Positions dtarget = adj_total.targets;
        if (!g_spatial.segment(t * x_spatial.frame_size(), x_spatial.frame_size()).isZero(0.0)) {
            const Positions gv_sp = render::warp_gradient(m_scene.image, m_scene.mesh(), fp.spatial_vertices[ts],
                                                          frame_image(x_spatial, g_spatial, t));
            const auto adj_sp = deform::solve_adjoint(sys, gv_sp);
            djp += adj_sp.jacobian;
            dtarget += adj_sp.targets;
        }
        grad_temporal.push_back(std::move(dj));
        grad_spatial_jac.push_back(std::move(djp));
        grad_targets.push_back(std::move(dtarget));
    }

    const auto via_ode = m_temporal_model.backward(fp.state, m_params, fp.temporal_tape, grad_temporal, grads);
    std::vector<trajectory::ControlPoints> grad_control(static_cast<std::size_t>(fp.trajectory.keypoint_count()));
    for (auto& c : grad_control) c.fill(Vec2::Zero());
    for (int t = 0; t < n; ++t) {
        const auto ts = static_cast<std::size_t>(t);
        grad_spatial_jac[ts] += via_ode[ts];
        const Positions gv_posed = ops.jacobians_adjoint(grad_spatial_jac[ts]);
        grad_targets[ts] += deform::solve_adjoint(sys, gv_posed).targets;
        const auto gc = trajectory::sample_gradient(fp.trajectory, t, grad_targets[ts]);
        for (std::size_t i = 0; i < gc.size(); ++i)
            for (std::size_t j = 0; j < 4; ++j) grad_control[i][j] += gc[i][j];
    }
    m_traj_model.backward(m_params, fp.trajectory_tape, grad_control, grads);
    return log;
}

StepLog Animator::step(const guidance::ScoreOracle& oracle)
{
    nn::GradStore grads;
    StepLog log = evaluate(oracle, grads, m_sds_rng, m_flow_rng);
    log.step = m_steps++;
    m_params.adam_step(grads, m_options.adam);
    return log;
}

} // namespace flexmesh::pipeline
