#include <doctest.h>

#include "deform/rest_fit.hpp"
#include "deform/solver.hpp"
#include "fixtures.hpp"

#include <Eigen/Dense>

using namespace flexmesh;
using namespace flexmesh::deform;

namespace {

/// Dense least squares over the stacked system [L; sqrt(w) K] V = [div J; sqrt(w) T].
Positions dense_oracle(const DifferentialOperators& ops, const JacobianField& j, const Positions& t, double w)
{
    const int n = ops.vertex_count();
    const auto& ids = ops.mesh().keypoint_ids();
    const int k = static_cast<int>(ids.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + k, n);
    a.topRows(n) = Eigen::MatrixXd(ops.laplacian());
    for (int i = 0; i < k; ++i) a(n + i, ids[static_cast<std::size_t>(i)]) = std::sqrt(w);
    Eigen::MatrixXd b(n + k, 2);
    b.topRows(n) = ops.divergence(j);
    b.bottomRows(k) = std::sqrt(w) * t;
    return a.colPivHouseholderQr().solve(b);
}

JacobianField random_field(Rng& rng, std::size_t faces, double scale)
{
    JacobianField j = JacobianField::identity(faces);
    for (auto& m : j.per_face)
        for (int i = 0; i < 4; ++i) m.data()[i] += scale * rng.normal();
    return j;
}

} // namespace

TEST_CASE("solve matches the dense least-squares oracle")
{
    Rng rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const auto m = fixtures::random_mesh(rng, 200);
        auto ops = std::make_shared<const DifferentialOperators>(m);
        const auto sys = assemble(ops, 1000.0);
        const auto j = random_field(rng, static_cast<std::size_t>(m.face_count()), 0.2);
        Positions t = m.keypoint_positions() + 0.05 * Positions::Random(m.keypoint_count(), 2);
        const Positions v = solve(sys, j, {t, 1000.0});
        const Positions ref = dense_oracle(*ops, j, t, 1000.0);
        CHECK((v - ref).norm() / ref.norm() < 1e-8);
    }
}

TEST_CASE("rest Jacobians with rest keypoints reproduce the rest mesh")
{
    const auto m = fixtures::grid_mesh(5, 4, {0, 7, 19}, 0.2);
    auto ops = std::make_shared<const DifferentialOperators>(m);
    const auto sys = assemble(ops, 1000.0);
    const Positions v = solve(sys, ops->jacobians(m.vertices()), {m.keypoint_positions(), 1000.0});
    CHECK((v - m.vertices()).norm() < 1e-10);
}

TEST_CASE("solver error paths")
{
    const auto m = fixtures::grid_mesh(3, 3, {});
    auto ops = std::make_shared<const DifferentialOperators>(m);
    CHECK_CODE(assemble(ops, 1000.0), ErrorCode::SingularSystem);

    const auto mk = fixtures::grid_mesh(3, 3, {4});
    auto ops2 = std::make_shared<const DifferentialOperators>(mk);
    const auto sys = assemble(ops2, 1000.0);
    JacobianField j = JacobianField::identity(static_cast<std::size_t>(mk.face_count()));
    CHECK_CODE(solve(sys, j, {Positions::Zero(2, 2), 1000.0}), ErrorCode::ShapeMismatch);
    CHECK_CODE(solve(sys, j, {mk.keypoint_positions(), 10.0}), ErrorCode::InvalidArgument);
    j[0](0, 0) = std::nan("");
    CHECK_CODE(solve(sys, j, {mk.keypoint_positions(), 1000.0}), ErrorCode::NonFinite);
    CHECK_CODE(assemble(ops2, -1.0), ErrorCode::InvalidArgument);
}

TEST_CASE("solve adjoint matches central differences")
{
    Rng rng(13);
    const auto m = fixtures::random_mesh(rng, 80);
    auto ops = std::make_shared<const DifferentialOperators>(m);
    const auto sys = assemble(ops, 1000.0);
    const auto j = random_field(rng, static_cast<std::size_t>(m.face_count()), 0.1);
    const Positions t = m.keypoint_positions();
    const Positions w = Positions::Random(m.vertex_count(), 2);
    auto loss = [&](const JacobianField& jj, const Positions& tt) { return (solve(sys, jj, {tt, 1000.0}).array() * w.array()).sum(); };
    const auto g = solve_adjoint(sys, w);

    JacobianField dj(static_cast<std::size_t>(m.face_count()));
    for (auto& x : dj.per_face) x = Mat2::Random();
    const Positions dt = Positions::Random(m.keypoint_count(), 2);
    const double h = 1e-5;
    const double fd = (loss(j + h * dj, t + h * dt) - loss(j - h * dj, t - h * dt)) / (2 * h);
    double an = (g.targets.array() * dt.array()).sum();
    for (std::size_t f = 0; f < dj.size(); ++f) an += (g.jacobian[f].array() * dj[f].array()).sum();
    CHECK(fixtures::rel_err(an, fd) < 1e-6);
}

TEST_CASE("rest fit reaches identity and is deterministic")
{
    const auto m = fixtures::grid_mesh(10, 5, {0, 9, 45}, 0.25, 21);
    REQUIRE(m.vertex_count() == 50);
    auto ops = std::make_shared<const DifferentialOperators>(m);
    const auto sys = assemble(ops, 1000.0);
    RestFitOptions opt;
    opt.init_noise = 0.05;
    opt.seed = 4;
    const auto a = fit_rest_jacobians(sys, opt);
    CHECK(a.iterations_run <= 10000);
    CHECK(mean_identity_deviation(a.jacobians) < 1e-3);
    for (std::size_t i = 1; i < a.history.size(); ++i) CHECK(a.history[i] <= a.history[i - 1]);
    const auto b = fit_rest_jacobians(sys, opt);
    CHECK(a.jacobians.flatten() == b.jacobians.flatten());

    CHECK(rest_objective(JacobianField::identity(4)) == 0.0);
    JacobianField two = JacobianField::identity(2);
    two[0] *= 2.0;
    CHECK(rest_objective(two) == doctest::Approx(std::sqrt(2.0)));
    CHECK(rest_objective(two, true) == doctest::Approx(2.0));
}
