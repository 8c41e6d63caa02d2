#include "guidance/pfode.hpp"

#include "common/error.hpp"
#include "common/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace flexmesh::guidance {

Particles pfode_integrate(const Particles& particles, const NoiseSchedule& schedule, const ScoreFn& score, int steps)
{
    require(steps >= 1, ErrorCode::InvalidArgument, "pfODE needs at least one step");
    require(particles.cols() == schedule.dimension(), ErrorCode::ShapeMismatch,
            "particle dimension " + std::to_string(particles.cols()) + " differs from schedule dimension " +
                std::to_string(schedule.dimension()));
    const double h = schedule.horizon() / steps;
    Particles x = schedule.A(0.0) * particles;
    for (int k = 0; k < steps; ++k) {
        const double t = k * h;
        const double a = schedule.A(t);
        const Eigen::RowVectorXd cdot = schedule.C_dot(t).transpose();
        const Particles s = score(x / a, t);
        require(s.rows() == x.rows() && s.cols() == x.cols(), ErrorCode::ShapeMismatch, "score has the wrong shape");
        x += h * ((-0.5 * a) * (s.array().rowwise() * cdot.array()).matrix() + (schedule.A_dot(t) / a) * x);
        if (!x.allFinite()) fail(ErrorCode::NonFinite, "pfODE state became non-finite at step " + std::to_string(k));
    }
    return x;
}

Particles sde_integrate(const Particles& particles, const NoiseSchedule& schedule, int steps, Rng& rng)
{
    require(steps >= 1, ErrorCode::InvalidArgument, "SDE needs at least one step");
    require(particles.cols() == schedule.dimension(), ErrorCode::ShapeMismatch, "particle dimension mismatch");
    const double h = schedule.horizon() / steps;
    Particles x = particles;
    for (int k = 0; k < steps; ++k) {
        const Eigen::VectorXd g = (schedule.C_dot(k * h) * h).cwiseSqrt();
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            for (Eigen::Index d = 0; d < x.cols(); ++d) x(i, d) += g[d] * rng.normal();
    }
    return x;
}

Eigen::MatrixXd empirical_covariance(const Particles& x)
{
    require(x.rows() >= 2, ErrorCode::InvalidArgument, "covariance needs at least two particles");
    const Particles c = x.rowwise() - x.colwise().mean();
    return c.transpose() * c / static_cast<double>(x.rows() - 1);
}

double relative_covariance_error(const Particles& x, const Eigen::MatrixXd& reference)
{
    const Eigen::MatrixXd c = empirical_covariance(x);
    double worst = 0;
    for (Eigen::Index i = 0; i < c.rows(); ++i)
        for (Eigen::Index j = 0; j < c.cols(); ++j)
            worst = std::max(worst, std::abs(c(i, j) - reference(i, j)) / std::sqrt(reference(i, i) * reference(j, j)));
    return worst;
}

namespace {

std::vector<Eigen::Index> nearest(const Particles& x, Eigen::Index q, int k)
{
    std::vector<std::pair<double, Eigen::Index>> d;
    d.reserve(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        if (i != q) d.emplace_back((x.row(i) - x.row(q)).squaredNorm(), i);
    std::partial_sort(d.begin(), d.begin() + k, d.end());
    std::vector<Eigen::Index> out;
    for (int j = 0; j < k; ++j) out.push_back(d[static_cast<std::size_t>(j)].second);
    std::sort(out.begin(), out.end());
    return out;
}

void marginal_moments(const Particles& x, double& skew, double& kurt)
{
    for (Eigen::Index d = 0; d < x.cols(); ++d) {
        const Eigen::ArrayXd c = x.col(d).array() - x.col(d).mean();
        const double m2 = c.square().mean();
        skew = std::max(skew, std::abs(c.cube().mean() / std::pow(m2, 1.5)));
        kurt = std::max(kurt, std::abs(c.square().square().mean() / (m2 * m2) - 3.0));
    }
}

} // namespace

double neighborhood_overlap(const Particles& before, const Particles& after, int k, int queries, Rng& rng)
{
    require(before.rows() == after.rows(), ErrorCode::ShapeMismatch, "overlap needs matching particle sets");
    require(k >= 1 && before.rows() > k, ErrorCode::InvalidArgument, "not enough particles for k neighbours");
    require(queries >= 1, ErrorCode::InvalidArgument, "need at least one query");
    double total = 0;
    for (int q = 0; q < queries; ++q) {
        const auto i = static_cast<Eigen::Index>(rng.engine()() % static_cast<std::uint64_t>(before.rows()));
        const auto a = nearest(before, i, k);
        const auto b = nearest(after, i, k);
        std::vector<Eigen::Index> common;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
        total += static_cast<double>(common.size()) / k;
    }
    return total / queries;
}

FokkerPlanckReport verify_fokker_planck(const NoiseSchedule& schedule, const FokkerPlanckOptions& options)
{
    const auto start = std::chrono::steady_clock::now();
    const int d = schedule.dimension();
    require(options.particles >= 2, ErrorCode::InvalidArgument, "need at least two particles");
    require(options.fault_scale >= 0, ErrorCode::InvalidArgument, "fault scale must be nonnegative");
    const Eigen::VectorXd sigma0 = options.sigma0.size() == 0 ? Eigen::VectorXd::Ones(d) : options.sigma0;
    require(sigma0.size() == d && (sigma0.array() > 0).all(), ErrorCode::InvalidArgument,
            "sigma0 must be a positive diagonal of the schedule's dimension");

    Rng root(options.seed);
    Rng init_rng = root.split("init");
    Particles x0(options.particles, d);
    for (Eigen::Index i = 0; i < x0.rows(); ++i)
        for (int k = 0; k < d; ++k) x0(i, k) = std::sqrt(sigma0[k]) * init_rng.normal();

    // Integrators see fault_scale * Cdot; the score and reference keep the true path.
    NoiseSchedule drift = NoiseSchedule::linear(options.fault_scale * schedule.C_dot(0.0), schedule.horizon());
    const ScoreFn score = [&](const Particles& x, double t) -> Particles {
        const Eigen::RowVectorXd inv = (sigma0 + schedule.C(t)).cwiseInverse().transpose();
        return -(x.array().rowwise() * inv.array()).matrix();
    };

    Rng sde_rng = root.split("sde");
    const Particles x_sde = sde_integrate(x0, drift, options.steps, sde_rng);
    const Particles x_ode = pfode_integrate(x0, drift, score, options.steps);

    const Eigen::MatrixXd reference = (sigma0 + schedule.C(schedule.horizon())).asDiagonal();
    FokkerPlanckReport rep;
    rep.sde_error = relative_covariance_error(x_sde, reference);
    rep.ode_error = relative_covariance_error(x_ode, reference);
    rep.max_error = std::max(rep.sde_error, rep.ode_error);
    rep.passed = rep.max_error < options.tolerance;

    marginal_moments(x_ode, rep.max_abs_skew, rep.max_abs_excess_kurtosis);
    marginal_moments(x_sde, rep.max_abs_skew, rep.max_abs_excess_kurtosis);

    if (options.locality_queries > 0 && options.particles > options.locality_k) {
        Rng q_ode = root.split("locality");
        Rng q_sde = root.split("locality");
        rep.ode_locality = neighborhood_overlap(x0, x_ode, options.locality_k, options.locality_queries, q_ode);
        rep.sde_locality = neighborhood_overlap(x0, x_sde, options.locality_k, options.locality_queries, q_sde);
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

} // namespace flexmesh::guidance
