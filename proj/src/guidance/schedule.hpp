#pragma once

#include <Eigen/Core>

namespace flexmesh {
class Rng;
}

namespace flexmesh::guidance {

/// Variance-preserving noising z = sqrt(abar) X + sigma eps with abar
/// decreasing linearly from 1 at t' = 0 to abar_min at t' = horizon.
struct DiffusionSchedule
{
    double horizon = 1000.0;
    double alpha_bar_min = 0.01;
    double t_min_fraction = 0.02;
    double t_max_fraction = 0.98;

    void validate() const;
    double alpha_bar(double t_prime) const;
    double sigma(double t_prime) const;
    /// t' ~ U(t_min_fraction, t_max_fraction) * horizon.
    double sample_timestep(Rng& rng) const;
};

/// Diagonal covariance path C(t) = t diag(rates) on [0, horizon] with an
/// optional scalar rescaling A(t). Generalized-variance rescaling uses
/// A(t) = det(Sigma0 + C(t))^(-1/(2d)) for a diagonal Sigma0.
class NoiseSchedule
{
public:
    enum class Rescaling
    {
        None,
        GeneralizedVariance,
    };

    static NoiseSchedule linear(Eigen::VectorXd rates, double horizon = 1.0);

    NoiseSchedule& with_generalized_variance(Eigen::VectorXd sigma0_diag);

    int dimension() const { return static_cast<int>(m_rates.size()); }
    double horizon() const { return m_horizon; }
    Rescaling rescaling() const { return m_rescaling; }

    Eigen::VectorXd C(double t) const { return t * m_rates; }
    Eigen::VectorXd C_dot(double) const { return m_rates; }
    double A(double t) const;
    double A_dot(double t) const;

private:
    NoiseSchedule(Eigen::VectorXd rates, double horizon);

    Eigen::VectorXd m_rates;
    double m_horizon;
    Rescaling m_rescaling = Rescaling::None;
    Eigen::VectorXd m_sigma0;
};

} // namespace flexmesh::guidance
