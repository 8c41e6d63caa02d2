#pragma once

#include "guidance/schedule.hpp"

#include <Eigen/Core>

#include <functional>

namespace flexmesh::guidance {

/// Rows are particles.
using Particles = Eigen::MatrixXd;

/// score(x, t) of the marginal at time t, evaluated row-wise on original
/// (unscaled) coordinates.
using ScoreFn = std::function<Particles(const Particles& x, double t)>;

/// Euler steps of dx~/dt = A (-1/2 Cdot score(x~/A)) + (Adot/A) x~ on
/// [0, horizon]. Input particles are in original coordinates at t = 0 and
/// the result is in rescaled coordinates x~ = A(T) x.
Particles pfode_integrate(const Particles& particles, const NoiseSchedule& schedule, const ScoreFn& score, int steps);

/// Euler-Maruyama for dx = G dW with G G^T = Cdot.
Particles sde_integrate(const Particles& particles, const NoiseSchedule& schedule, int steps, Rng& rng);

struct FokkerPlanckOptions
{
    int particles = 50000;
    int steps = 200;
    std::uint64_t seed = 0;
    Eigen::VectorXd sigma0; // diagonal; identity when empty
    /// Fault injection: both integrators use fault_scale * Cdot while the
    /// reference covariance keeps the true schedule.
    double fault_scale = 1.0;
    double tolerance = 0.05;
    int locality_k = 10;
    int locality_queries = 1000;
};

struct FokkerPlanckReport
{
    double sde_error = 0;
    double ode_error = 0;
    double max_error = 0;
    double ode_locality = 0;
    double sde_locality = 0;
    double max_abs_skew = 0;
    double max_abs_excess_kurtosis = 0;
    double seconds = 0;
    bool passed = false;
};

/// Runs both ensembles from one N(0, Sigma0) draw and compares each terminal
/// covariance with Sigma0 + C(T). Error per entry is |C^_ij - C_ij| / sqrt(C_ii C_jj).
FokkerPlanckReport verify_fokker_planck(const NoiseSchedule& schedule, const FokkerPlanckOptions& options);

/// Max over entries of |cov(x)_ij - ref_ij| / sqrt(ref_ii ref_jj).
double relative_covariance_error(const Particles& x, const Eigen::MatrixXd& reference);

Eigen::MatrixXd empirical_covariance(const Particles& x);

/// Mean fraction of each query's k nearest neighbours (excluding itself)
/// shared between two configurations of the same particles.
double neighborhood_overlap(const Particles& before, const Particles& after, int k, int queries, Rng& rng);

} // namespace flexmesh::guidance
