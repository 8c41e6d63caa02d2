#include <doctest.h>

#include "fixtures.hpp"
#include "metrics/metrics.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace flexmesh;
using namespace flexmesh::metrics;

namespace {

MotionRecord from_points(const std::vector<std::vector<Vec2>>& frames)
{
    MotionRecord r;
    for (const auto& f : frames) {
        Positions p(static_cast<Eigen::Index>(f.size()), 2);
        for (std::size_t i = 0; i < f.size(); ++i) p.row(static_cast<Eigen::Index>(i)) = f[i].transpose();
        r.frames.push_back(p);
    }
    return r;
}

} // namespace

TEST_CASE("static motion scores zero")
{
    Positions p = Positions::Random(4, 2);
    MotionRecord r{std::vector<Positions>(24, p)};
    CHECK(deformation_smoothness(r) == 0.0);
    CHECK(animation_energy(r) == 0.0);
}

TEST_CASE("hand-built record")
{
    const auto r = from_points({{Vec2(0, 0), Vec2(0, 0)}, {Vec2(1, 0), Vec2(0, 0)}, {Vec2(1, 1), Vec2(0, 2)}});
    CHECK(deformation_smoothness(r) == (3.0 + std::sqrt(2.0)) / 4.0);
    CHECK(animation_energy(r) == 7.0 / 6.0);
    const auto rep = evaluate(r);
    CHECK(rep.ds_per_keypoint[0] == (1.0 + std::sqrt(2.0)) / 2.0);
    CHECK(rep.ae_per_keypoint[1] == 4.0 / 3.0);
    const std::string csv = report_csv(rep);
    CHECK(csv.rfind("metric,keypoint,value\nDS,all,", 0) == 0);
    CHECK(csv.find("AE,1,") != std::string::npos);
}

TEST_CASE("closed forms: constant velocity, alternation, constant offset")
{
    const int n = 24;
    const Vec2 v(0.03, -0.04);
    std::vector<std::vector<Vec2>> lin, alt, off;
    for (int t = 0; t < n; ++t) {
        lin.push_back({t * v});
        alt.push_back({(t % 2) * v});
        off.push_back({t == 0 ? Vec2(0, 0) : v});
    }
    CHECK(deformation_smoothness(from_points(lin)) == doctest::Approx(v.norm() / (n - 1)).epsilon(1e-13));
    CHECK(deformation_smoothness(from_points(alt)) ==
          doctest::Approx(2 * v.norm() * (n - 2) / (n - 1) + v.norm() / (n - 1)).epsilon(1e-13));
    CHECK(animation_energy(from_points(off)) == doctest::Approx(v.squaredNorm() * (n - 1) / n).epsilon(1e-13));
}

TEST_CASE("homogeneity and translation invariance")
{
    Rng rng(4);
    MotionRecord r;
    for (int t = 0; t < 10; ++t) r.frames.push_back(Positions::Random(3, 2));
    MotionRecord scaled = r, shifted = r;
    const double a = 1.7;
    for (auto& f : scaled.frames) f = r.frames[0] + a * (f - r.frames[0]);
    for (auto& f : shifted.frames) f.rowwise() += Eigen::RowVector2d(5.0, -3.0);
    CHECK(fixtures::rel_err(animation_energy(scaled), a * a * animation_energy(r)) < 1e-12);
    CHECK(fixtures::rel_err(animation_energy(shifted), animation_energy(r)) < 1e-12);
    CHECK(fixtures::rel_err(deformation_smoothness(shifted), deformation_smoothness(r)) < 1e-12);
}

TEST_CASE("shape errors")
{
    MotionRecord two{std::vector<Positions>(2, Positions::Zero(1, 2))};
    CHECK_CODE(deformation_smoothness(two), ErrorCode::InvalidArgument);
    CHECK(animation_energy(two) == 0.0);
    MotionRecord ragged{{Positions::Zero(2, 2), Positions::Zero(3, 2), Positions::Zero(2, 2)}};
    CHECK_CODE(deformation_smoothness(ragged), ErrorCode::ShapeMismatch);
    CHECK_CODE(animation_energy(MotionRecord{}), ErrorCode::InvalidArgument);
}

TEST_CASE("record JSON round trip and trajectory reduction")
{
    const auto path = std::filesystem::temp_directory_path() / "flexmesh_record.json";
    const auto r = from_points({{Vec2(0, 0)}, {Vec2(1, 0.5)}, {Vec2(2, 1)}});
    save_record(r, path);
    const auto back = load_record(path);
    CHECK(back.frames == r.frames);
    {
        std::ofstream(path) << R"({"frames": [[[0,0],[1,1]], [[0,0]], [[1,1],[2,2]]]})";
    }
    CHECK_CODE(load_record(path), ErrorCode::ShapeMismatch);

    trajectory::TrajectorySet traj;
    traj.frame_count = 5;
    traj.control_points.push_back({Vec2(0, 0), Vec2(1, 0), Vec2(2, 0), Vec2(3, 0)});
    CHECK(record_from_trajectories(traj, MotionSource::Keypoints).frame_count() == 5);
    const auto cp = record_from_trajectories(traj, MotionSource::ControlPoints);
    CHECK(cp.frame_count() == 4);
    CHECK(cp.frames[2](0, 0) == 2.0);
}
