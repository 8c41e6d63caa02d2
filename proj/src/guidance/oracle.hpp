#pragma once

#include "guidance/schedule.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <array>
#include <optional>
#include <string>

namespace flexmesh::guidance {

/// A clip flattened row-major over [frames, height, width, channels].
struct FrameStack
{
    std::array<int, 4> shape{0, 0, 0, 0};
    Eigen::VectorXd data;

    FrameStack() = default;
    FrameStack(std::array<int, 4> s, Eigen::VectorXd d);

    int frames() const { return shape[0]; }
    Eigen::Index frame_size() const { return static_cast<Eigen::Index>(shape[1]) * shape[2] * shape[3]; }
    bool same_shape(const FrameStack& o) const { return shape == o.shape; }

    /// Slice of one frame inside data.
    auto frame(int t) { return data.segment(t * frame_size(), frame_size()); }
    auto frame(int t) const { return data.segment(t * frame_size(), frame_size()); }
};

using Condition = std::optional<std::string>;

/// Noise predictor eps_hat(z, t', condition). Implementations must return a
/// vector with the same length as z.data and be deterministic in their inputs.
class ScoreOracle
{
public:
    virtual ~ScoreOracle() = default;

    virtual Eigen::VectorXd predict_eps(const FrameStack& z, double t_prime, const Condition& condition) const = 0;
    virtual std::string name() const = 0;

    const DiffusionSchedule& schedule() const { return m_schedule; }

protected:
    explicit ScoreOracle(DiffusionSchedule schedule);

private:
    DiffusionSchedule m_schedule;
};

/// Runs predict_eps with shape checks and timestep context on failure.
Eigen::VectorXd checked_predict(const ScoreOracle& oracle, const FrameStack& z, double t_prime,
                                const Condition& condition);

/// Fixed Gaussian N(mu, Sigma) used as the noisy marginal at every t':
/// eps_hat = sigma(t') Sigma^-1 (z - mu). Sigma may be dense or diagonal.
class GaussianAnalytic final : public ScoreOracle
{
public:
    GaussianAnalytic(Eigen::VectorXd mean, Eigen::MatrixXd covariance, DiffusionSchedule schedule = {});
    static GaussianAnalytic diagonal(Eigen::VectorXd mean, Eigen::VectorXd variances, DiffusionSchedule schedule = {});

    Eigen::VectorXd predict_eps(const FrameStack& z, double t_prime, const Condition& condition) const override;
    std::string name() const override { return "gaussian"; }

    /// -Sigma^-1 (x - mu)
    Eigen::VectorXd score(const Eigen::VectorXd& x) const;

private:
    GaussianAnalytic(Eigen::VectorXd mean, Eigen::VectorXd variances, DiffusionSchedule schedule, bool);

    Eigen::VectorXd m_mean;
    Eigen::VectorXd m_inv_diag; // used when m_dense is false
    Eigen::LLT<Eigen::MatrixXd> m_llt;
    bool m_dense = false;
};

/// Noise that exactly denoises toward a fixed reference clip:
/// eps_hat = (z - sqrt(abar) X_teacher) / sigma. The condition is ignored.
class TeacherOracle final : public ScoreOracle
{
public:
    TeacherOracle(FrameStack teacher, DiffusionSchedule schedule = {});

    Eigen::VectorXd predict_eps(const FrameStack& z, double t_prime, const Condition& condition) const override;
    std::string name() const override { return "teacher"; }

    const FrameStack& teacher() const { return m_teacher; }

private:
    FrameStack m_teacher;
};

} // namespace flexmesh::guidance
