#pragma once

#include "guidance/oracle.hpp"
#include "mesh/operators.hpp"

#include <functional>
#include <vector>

namespace flexmesh {
class Rng;
}

namespace flexmesh::guidance {

struct GuidanceConfig
{
    double guidance_scale = 50.0;
    double lambda = 15.0;
    /// w(t'); constant 1 unless replaced.
    std::function<double(double)> weight = [](double) { return 1.0; };
    int samples = 1;
    Condition condition;

    void validate() const;
};

Eigen::VectorXd cfg_combine(const Eigen::VectorXd& eps_cond, const Eigen::VectorXd& eps_uncond, double s);

/// eps_hat at z with classifier-free guidance; the unconditional pass is
/// skipped when s == 0.
Eigen::VectorXd guided_eps(const FrameStack& z, double t_prime, const ScoreOracle& oracle, const GuidanceConfig& config);

struct SdsResult
{
    Eigen::VectorXd gradient;  // dL/dX, averaged over samples
    double loss = 0;           // mean of w |eps_hat - eps|^2 / n
    std::vector<double> timesteps;
};

/// Monte-Carlo SDS: for each sample draw t', eps, form z, and accumulate
/// w(t') (eps_hat - eps) sqrt(abar(t')). The denoiser Jacobian is omitted.
SdsResult sds_gradient(const FrameStack& frames, const ScoreOracle& oracle, const GuidanceConfig& config, Rng& rng);

/// -eps_hat / sigma(t') with `frames` fed to the oracle as-is.
Eigen::VectorXd score_from_oracle(const FrameStack& frames, double t_prime, const ScoreOracle& oracle,
                                  const Condition& condition);

struct FlowResult
{
    double loss = 0;
    double score_term = 0;
    double penalty_term = 0;
    Eigen::VectorXd grad_total;
    Eigen::VectorXd grad_spatial;
    std::vector<mesh::JacobianField> grad_jacobians;         // dL/dJ_t
    std::vector<mesh::JacobianField> grad_spatial_jacobians; // dL/dJ^P_t
};

/// L = 1/N sum_t |s(X_t) - s(X^P_t)|^2 + 1/N sum_t |J_t - J^P_t|^2, where
/// both stacks are scored at z = X + sigma n with a shared noise draw n.
/// Frame gradients use ds/dz = -I/sigma^2 (denoised estimate held fixed).
FlowResult flow_matching_loss(const FrameStack& frames_total, const FrameStack& frames_spatial,
                              const std::vector<mesh::JacobianField>& jacobians,
                              const std::vector<mesh::JacobianField>& spatial_jacobians, const ScoreOracle& oracle,
                              const GuidanceConfig& config, Rng& rng);

double total_loss(double sds_term, double flow_term, double lambda);

} // namespace flexmesh::guidance
