#include "guidance/schedule.hpp"

#include "common/error.hpp"
#include "common/rng.hpp"

#include <cmath>

namespace flexmesh::guidance {

void DiffusionSchedule::validate() const
{
    require(std::isfinite(horizon) && horizon > 0, ErrorCode::InvalidArgument, "diffusion horizon must be positive");
    require(alpha_bar_min > 0 && alpha_bar_min < 1, ErrorCode::InvalidArgument, "alpha_bar_min must lie in (0, 1)");
    require(t_min_fraction > 0 && t_min_fraction < t_max_fraction && t_max_fraction <= 1, ErrorCode::InvalidArgument,
            "timestep fractions must satisfy 0 < min < max <= 1");
}

double DiffusionSchedule::alpha_bar(double t_prime) const
{
    require(t_prime >= 0 && t_prime <= horizon, ErrorCode::InvalidArgument,
            "timestep " + std::to_string(t_prime) + " outside [0, " + std::to_string(horizon) + "]");
    return 1.0 - (1.0 - alpha_bar_min) * t_prime / horizon;
}

double DiffusionSchedule::sigma(double t_prime) const
{
    return std::sqrt(1.0 - alpha_bar(t_prime));
}

double DiffusionSchedule::sample_timestep(Rng& rng) const
{
    return rng.uniform(t_min_fraction, t_max_fraction) * horizon;
}

NoiseSchedule::NoiseSchedule(Eigen::VectorXd rates, double horizon)
    : m_rates(std::move(rates))
    , m_horizon(horizon)
{
    require(m_rates.size() > 0, ErrorCode::InvalidArgument, "noise schedule needs at least one dimension");
    require(m_rates.allFinite() && (m_rates.array() >= 0).all(), ErrorCode::InvalidArgument,
            "covariance rates must be finite and nonnegative");
    require(std::isfinite(horizon) && horizon > 0, ErrorCode::InvalidArgument, "schedule horizon must be positive");
}

NoiseSchedule NoiseSchedule::linear(Eigen::VectorXd rates, double horizon)
{
    return NoiseSchedule(std::move(rates), horizon);
}

NoiseSchedule& NoiseSchedule::with_generalized_variance(Eigen::VectorXd sigma0_diag)
{
    require(sigma0_diag.size() == m_rates.size(), ErrorCode::ShapeMismatch, "sigma0 dimension mismatch");
    require((sigma0_diag.array() > 0).all(), ErrorCode::InvalidArgument, "sigma0 must be positive definite");
    m_sigma0 = std::move(sigma0_diag);
    m_rescaling = Rescaling::GeneralizedVariance;
    return *this;
}

double NoiseSchedule::A(double t) const
{
    if (m_rescaling == Rescaling::None) return 1.0;
    const double logdet = (m_sigma0 + C(t)).array().log().sum();
    return std::exp(-logdet / (2.0 * dimension()));
}

double NoiseSchedule::A_dot(double t) const
{
    if (m_rescaling == Rescaling::None) return 0.0;
    const double dlogdet = (m_rates.array() / (m_sigma0 + C(t)).array()).sum();
    return -A(t) * dlogdet / (2.0 * dimension());
}

} // namespace flexmesh::guidance
