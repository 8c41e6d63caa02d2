#include "guidance/oracle.hpp"

#include "common/error.hpp"
#include "common/types.hpp"

#include <cmath>

namespace flexmesh::guidance {

FrameStack::FrameStack(std::array<int, 4> s, Eigen::VectorXd d)
    : shape(s)
    , data(std::move(d))
{
    for (int v : shape) require(v > 0, ErrorCode::InvalidArgument, "frame stack dimensions must be positive");
    require(data.size() == static_cast<Eigen::Index>(shape[0]) * frame_size(), ErrorCode::ShapeMismatch,
            "frame stack data length does not match its shape");
}

ScoreOracle::ScoreOracle(DiffusionSchedule schedule)
    : m_schedule(schedule)
{
    m_schedule.validate();
}

Eigen::VectorXd checked_predict(const ScoreOracle& oracle, const FrameStack& z, double t_prime,
                                const Condition& condition)
{
    Eigen::VectorXd eps;
    try {
        eps = oracle.predict_eps(z, t_prime, condition);
    } catch (const Error& e) {
        fail(e.code(), oracle.name() + " oracle failed at t'=" + std::to_string(t_prime) + ": " + e.what());
    }
    require(eps.size() == z.data.size(), ErrorCode::Oracle,
            oracle.name() + " oracle returned " + std::to_string(eps.size()) + " values for " +
                std::to_string(z.data.size()) + " inputs at t'=" + std::to_string(t_prime));
    require(all_finite(eps), ErrorCode::NonFinite,
            oracle.name() + " oracle returned non-finite values at t'=" + std::to_string(t_prime));
    return eps;
}

GaussianAnalytic::GaussianAnalytic(Eigen::VectorXd mean, Eigen::MatrixXd covariance, DiffusionSchedule schedule)
    : ScoreOracle(schedule)
    , m_mean(std::move(mean))
    , m_dense(true)
{
    require(covariance.rows() == m_mean.size() && covariance.cols() == m_mean.size(), ErrorCode::ShapeMismatch,
            "covariance must be square and match the mean");
    m_llt.compute(covariance);
    require(m_llt.info() == Eigen::Success, ErrorCode::SingularSystem, "covariance is not positive definite");
}

GaussianAnalytic::GaussianAnalytic(Eigen::VectorXd mean, Eigen::VectorXd variances, DiffusionSchedule schedule, bool)
    : ScoreOracle(schedule)
    , m_mean(std::move(mean))
{
    require(variances.size() == m_mean.size(), ErrorCode::ShapeMismatch, "variances must match the mean");
    require((variances.array() > 0).all(), ErrorCode::InvalidArgument, "variances must be positive");
    m_inv_diag = variances.cwiseInverse();
}

GaussianAnalytic GaussianAnalytic::diagonal(Eigen::VectorXd mean, Eigen::VectorXd variances, DiffusionSchedule schedule)
{
    return GaussianAnalytic(std::move(mean), std::move(variances), schedule, true);
}

Eigen::VectorXd GaussianAnalytic::score(const Eigen::VectorXd& x) const
{
    require(x.size() == m_mean.size(), ErrorCode::ShapeMismatch,
            "gaussian oracle expects " + std::to_string(m_mean.size()) + " values, got " + std::to_string(x.size()));
    const Eigen::VectorXd d = x - m_mean;
    if (m_dense) return -m_llt.solve(d);
    return -m_inv_diag.cwiseProduct(d);
}

Eigen::VectorXd GaussianAnalytic::predict_eps(const FrameStack& z, double t_prime, const Condition&) const
{
    return -schedule().sigma(t_prime) * score(z.data);
}

TeacherOracle::TeacherOracle(FrameStack teacher, DiffusionSchedule schedule)
    : ScoreOracle(schedule)
    , m_teacher(std::move(teacher))
{
    require(all_finite(m_teacher.data), ErrorCode::NonFinite, "teacher frames are not finite");
}

Eigen::VectorXd TeacherOracle::predict_eps(const FrameStack& z, double t_prime, const Condition&) const
{
    require(z.same_shape(m_teacher), ErrorCode::ShapeMismatch, "frame stack shape differs from the teacher clip");
    const double s = schedule().sigma(t_prime);
    require(s > 0, ErrorCode::InvalidArgument, "teacher oracle needs t' > 0");
    return (z.data - std::sqrt(schedule().alpha_bar(t_prime)) * m_teacher.data) / s;
}

} // namespace flexmesh::guidance
