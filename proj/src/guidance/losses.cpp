#include "guidance/losses.hpp"

#include "common/error.hpp"
#include "common/rng.hpp"

#include <cmath>

namespace flexmesh::guidance {

namespace {

Eigen::VectorXd gaussian(Eigen::Index n, Rng& rng)
{
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
    return v;
}

} // namespace

void GuidanceConfig::validate() const
{
    require(std::isfinite(guidance_scale) && guidance_scale >= 0, ErrorCode::InvalidArgument,
            "guidance scale must be >= 0");
    require(std::isfinite(lambda) && lambda >= 0, ErrorCode::InvalidArgument, "loss weight lambda must be >= 0");
    require(samples >= 1, ErrorCode::InvalidArgument, "need at least one Monte-Carlo sample");
    require(static_cast<bool>(weight), ErrorCode::InvalidArgument, "timestep weight is unset");
}

Eigen::VectorXd cfg_combine(const Eigen::VectorXd& eps_cond, const Eigen::VectorXd& eps_uncond, double s)
{
    require(eps_cond.size() == eps_uncond.size(), ErrorCode::ShapeMismatch,
            "cfg_combine: conditional and unconditional predictions differ in size");
    return (1.0 + s) * eps_cond - s * eps_uncond;
}

Eigen::VectorXd guided_eps(const FrameStack& z, double t_prime, const ScoreOracle& oracle, const GuidanceConfig& config)
{
    Eigen::VectorXd cond = checked_predict(oracle, z, t_prime, config.condition);
    if (config.guidance_scale == 0) return cond;
    return cfg_combine(cond, checked_predict(oracle, z, t_prime, std::nullopt), config.guidance_scale);
}

SdsResult sds_gradient(const FrameStack& frames, const ScoreOracle& oracle, const GuidanceConfig& config, Rng& rng)
{
    config.validate();
    require(all_finite(frames.data), ErrorCode::NonFinite, "SDS input frames are not finite");
    const auto& sched = oracle.schedule();
    SdsResult out;
    out.gradient = Eigen::VectorXd::Zero(frames.data.size());
    const double n = static_cast<double>(frames.data.size());
    for (int k = 0; k < config.samples; ++k) {
        const double tp = sched.sample_timestep(rng);
        const Eigen::VectorXd eps = gaussian(frames.data.size(), rng);
        const double abar = sched.alpha_bar(tp);
        FrameStack z(frames.shape, std::sqrt(abar) * frames.data + sched.sigma(tp) * eps);
        const double w = config.weight(tp);
        require(w >= 0 && std::isfinite(w), ErrorCode::InvalidArgument, "timestep weight must be >= 0");
        out.timesteps.push_back(tp);
        if (w == 0) continue;
        const Eigen::VectorXd residual = guided_eps(z, tp, oracle, config) - eps;
        out.gradient += w * std::sqrt(abar) * residual;
        out.loss += w * residual.squaredNorm() / n;
    }
    out.gradient /= config.samples;
    out.loss /= config.samples;
    return out;
}

Eigen::VectorXd score_from_oracle(const FrameStack& frames, double t_prime, const ScoreOracle& oracle,
                                  const Condition& condition)
{
    require(t_prime > 0 && t_prime <= oracle.schedule().horizon, ErrorCode::InvalidArgument,
            "score needs t' in (0, T], got " + std::to_string(t_prime));
    return -checked_predict(oracle, frames, t_prime, condition) / oracle.schedule().sigma(t_prime);
}

FlowResult flow_matching_loss(const FrameStack& frames_total, const FrameStack& frames_spatial,
                              const std::vector<mesh::JacobianField>& jacobians,
                              const std::vector<mesh::JacobianField>& spatial_jacobians, const ScoreOracle& oracle,
                              const GuidanceConfig& config, Rng& rng)
{
    config.validate();
    require(frames_total.same_shape(frames_spatial), ErrorCode::ShapeMismatch,
            "flow loss: total and spatial frame stacks differ in shape");
    const int n_frames = frames_total.frames();
    require(static_cast<int>(jacobians.size()) == n_frames && static_cast<int>(spatial_jacobians.size()) == n_frames,
            ErrorCode::ShapeMismatch,
            "flow loss: expected " + std::to_string(n_frames) + " Jacobian fields per variant, got " +
                std::to_string(jacobians.size()) + " and " + std::to_string(spatial_jacobians.size()));

    FlowResult out;
    const double inv_n = 1.0 / n_frames;
    out.grad_total = Eigen::VectorXd::Zero(frames_total.data.size());
    out.grad_spatial = Eigen::VectorXd::Zero(frames_total.data.size());

    const bool same_frames = frames_total.data == frames_spatial.data;
    if (!same_frames) {
        const auto& sched = oracle.schedule();
        for (int k = 0; k < config.samples; ++k) {
            const double tp = sched.sample_timestep(rng);
            const double sigma = sched.sigma(tp);
            const Eigen::VectorXd noise = gaussian(frames_total.data.size(), rng);
            const FrameStack zt(frames_total.shape, frames_total.data + sigma * noise);
            const FrameStack zs(frames_spatial.shape, frames_spatial.data + sigma * noise);
            const Eigen::VectorXd diff =
                score_from_oracle(zt, tp, oracle, config.condition) - score_from_oracle(zs, tp, oracle, config.condition);
            out.score_term += inv_n * diff.squaredNorm();
            const Eigen::VectorXd g = (-2.0 * inv_n / (sigma * sigma)) * diff;
            out.grad_total += g;
            out.grad_spatial -= g;
        }
        out.score_term /= config.samples;
        out.grad_total /= config.samples;
        out.grad_spatial /= config.samples;
    }

    for (int t = 0; t < n_frames; ++t) {
        const auto& j = jacobians[static_cast<std::size_t>(t)];
        const auto& jp = spatial_jacobians[static_cast<std::size_t>(t)];
        require(j.size() == jp.size(), ErrorCode::ShapeMismatch,
                "flow loss: face count differs at frame " + std::to_string(t));
        mesh::JacobianField d = j - jp;
        out.penalty_term += inv_n * d.squared_norm();
        d *= 2.0 * inv_n;
        out.grad_spatial_jacobians.push_back(-1.0 * d);
        out.grad_jacobians.push_back(std::move(d));
    }
    out.loss = out.score_term + out.penalty_term;
    return out;
}

double total_loss(double sds_term, double flow_term, double lambda)
{
    require(lambda >= 0, ErrorCode::InvalidArgument, "lambda must be >= 0");
    return sds_term + lambda * flow_term;
}

} // namespace flexmesh::guidance
