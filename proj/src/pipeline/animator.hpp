#pragma once

#include "common/rng.hpp"
#include "deform/solver.hpp"
#include "guidance/losses.hpp"
#include "nn/param_store.hpp"
#include "render/raster_image.hpp"
#include "temporal/temporal.hpp"
#include "trajectory/trajectory_mlp.hpp"

#include <memory>
#include <vector>

namespace flexmesh::pipeline {

/// Fixed inputs of an animation run.
struct Scene
{
    std::shared_ptr<const mesh::DifferentialOperators> ops;
    std::shared_ptr<const deform::FactorizedSystem> system;
    mesh::JacobianField rest_jacobians;
    render::RasterImage image;

    static Scene build(mesh::TriMesh mesh, render::RasterImage image, mesh::JacobianField rest_jacobians,
                       double constraint_weight);

    const mesh::TriMesh& mesh() const { return ops->mesh(); }
};

/// Poses every frame from keypoint targets alone: V_t = solve(J0, p_t).
std::vector<Positions> pose_trajectory(const Scene& scene, const trajectory::TrajectorySet& traj);

/// Warps the scene image once per vertex set into a [N, h, w, 4] stack.
guidance::FrameStack render_stack(const Scene& scene, const std::vector<Positions>& vertices, int width, int height);

std::vector<render::RasterImage> render_frames(const Scene& scene, const std::vector<Positions>& vertices, int width,
                                               int height);

struct AnimatorOptions
{
    int frames = 24;
    int render_width = 64;
    int render_height = 64;
    nn::AdamOptions adam;
    guidance::GuidanceConfig guidance;
    trajectory::TrajectoryModelConfig trajectory;
    temporal::TemporalConfig temporal;
    std::uint64_t seed = 0;
};

struct StepLog
{
    int step = 0;
    double sds = 0;
    double flow = 0;
    double total = 0;
};

/// Everything the forward pass produced, kept for the reverse pass.
struct ForwardPass
{
    trajectory::TrajectorySet trajectory;
    trajectory::TrajectoryTape trajectory_tape;
    std::vector<Positions> targets;
    std::vector<Positions> posed;           // solve(J0, p_t)
    temporal::TemporalState state;
    temporal::IntegrationTape temporal_tape;
    std::vector<mesh::JacobianField> total; // J^P_t + J^R_t
    std::vector<Positions> spatial_vertices; // solve(J^P_t, p_t)
    std::vector<Positions> total_vertices;   // solve(J_t, p_t)
};

/// Trajectory MLP + temporal ODE optimized against a score oracle.
class Animator
{
public:
    Animator(Scene scene, AnimatorOptions options);

    const Scene& scene() const { return m_scene; }
    const AnimatorOptions& options() const { return m_options; }
    const nn::ParamStore& params() const { return m_params; }
    nn::ParamStore& params() { return m_params; }

    ForwardPass forward() const;

    /// One optimizer step: forward, losses, reverse pass, Adam update.
    StepLog step(const guidance::ScoreOracle& oracle);

    /// Loss and parameter gradients without updating (for tests).
    StepLog evaluate(const guidance::ScoreOracle& oracle, nn::GradStore& grads, Rng& sds_rng, Rng& flow_rng) const;

    trajectory::TrajectorySet trajectory() const;

    int steps_taken() const { return m_steps; }

private:
    Scene m_scene;
    AnimatorOptions m_options;
    trajectory::TrajectoryModel m_traj_model;
    temporal::TemporalModel m_temporal_model;
    nn::ParamStore m_params;
    Rng m_sds_rng;
    Rng m_flow_rng;
    int m_steps = 0;
};

} // namespace flexmesh::pipeline
