#pragma once

#include "deform/solver.hpp"

#include <cstdint>
#include <vector>

namespace flexmesh::deform {

struct RestFitOptions
{
    int iterations = 10000;
    double step_size = 0.01;
    /// Std-dev of the Gaussian perturbation added to the identity start.
    double init_noise = 0.0;
    std::uint64_t seed = 0;
    /// Minimize sum ||J_f - I||_F^2 instead of the unsquared norm.
    bool squared = false;
    /// Stop once the objective falls below this value.
    double tolerance = 1e-12;
    /// Consecutive rejected steps before giving up.
    int divergence_patience = 50;
};

struct RestFitResult
{
    JacobianField jacobians;
    /// Objective after every accepted step, starting with the initial value.
    std::vector<double> history;
    int iterations_run = 0;
    double mean_free_deviation = 0;
    double mean_recovered_deviation = 0;
};

/// sum_f ||J_f - I||_F (or its square when `squared`); exactly 0 at J = I.
double rest_objective(const JacobianField& jac, bool squared = false);

double mean_identity_deviation(const JacobianField& jac);

/// Learns the rest Jacobians J0 with zero keypoint displacement: each
/// iteration takes a clamped subgradient step on rest_objective and maps
/// the field back through solve/recover so it stays consistent with a
/// vertex configuration. Steps that increase the objective are rejected
/// (and the step halved); `divergence_patience` consecutive rejections
/// raise ErrorCode::Divergence.
RestFitResult fit_rest_jacobians(const FactorizedSystem& sys, const RestFitOptions& options);

} // namespace flexmesh::deform
