#include <doctest.h>

#include "fixtures.hpp"
#include "render/image_io.hpp"
#include "render/warp.hpp"

#include <filesystem>
#include <fstream>

using namespace flexmesh;
using namespace flexmesh::render;

namespace {

/// Mesh covering the full unit square.
mesh::TriMesh full_square(int n)
{
    return fixtures::grid_mesh(n, n, {0}, 0.0, 1, 0.0, 1.0, 0.0, 1.0);
}

} // namespace

TEST_CASE("identity warp reproduces the input")
{
    const auto img = fixtures::smooth_image(32, 24);
    const auto m = full_square(5);
    WarpStats st;
    const auto out = warp(img, m, m.vertices(), 0, 0, &st);
    CHECK(st.inverted_faces == 0);
    CHECK(st.covered_pixels == 32 * 24);
    double worst = 0;
    for (std::size_t i = 0; i < img.size(); ++i) worst = std::max(worst, std::abs(out.data()[i] - img.data()[i]));
    CHECK(worst <= 1.0 / 255);
}

TEST_CASE("whole-pixel translation shifts the image and leaves transparent borders")
{
    const int w = 40, h = 40;
    const auto img = fixtures::smooth_image(w, h);
    const auto m = fixtures::grid_mesh(4, 4, {0}, 0.0, 1, 0.25, 0.75, 0.25, 0.75);
    Positions moved = m.vertices();
    moved.col(0).array() += 3.0 / w;
    moved.col(1).array() += 2.0 / h;
    const auto out = warp(img, m, moved);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double cx = (x + 0.5) / w - 3.0 / w, cy = (y + 0.5) / h - 2.0 / h;
            const bool inside = cx > 0.26 && cx < 0.74 && cy > 0.26 && cy < 0.74;
            const bool outside = cx < 0.24 || cx > 0.76 || cy < 0.24 || cy > 0.76;
            if (inside)
                for (int c = 0; c < 4; ++c) CHECK(std::abs(out.at(x, y, c) - img.at(x - 3, y - 2, c)) < 1e-9);
            if (outside) CHECK(out.at(x, y, 3) == 0.0);
        }
}

TEST_CASE("scaling a constant image keeps the color")
{
    RasterImage img(20, 20);
    img.fill({0.2, 0.4, 0.6, 1.0});
    const auto m = fixtures::grid_mesh(3, 3, {0}, 0.0, 1, 0.4, 0.6, 0.4, 0.6);
    Positions big = ((m.vertices().rowwise() - Eigen::RowVector2d(0.5, 0.5)) * 2.0).rowwise() + Eigen::RowVector2d(0.5, 0.5);
    const auto out = warp(img, m, big);
    WarpStats st;
    warp(img, m, big, 0, 0, &st);
    CHECK(st.covered_pixels > 0);
    for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 20; ++x)
            if (out.at(x, y, 3) > 0) CHECK(std::abs(out.at(x, y, 1) - 0.4) < 1e-12);
}

TEST_CASE("fold-overs are counted and rendered")
{
    const auto img = fixtures::smooth_image(16, 16);
    const auto m = fixtures::grid_mesh(3, 3, {0}, 0.0, 1, 0.2, 0.8, 0.2, 0.8);
    Positions v = m.vertices();
    v.row(4) << 0.9, 0.9; // drag the center past a corner
    WarpStats st;
    warp(img, m, v, 0, 0, &st);
    CHECK(st.inverted_faces > 0);
    CHECK_CODE(warp(img, m, Positions::Zero(3, 2)), ErrorCode::ShapeMismatch);
}

TEST_CASE("warp gradient: zero cases, linearity and finite differences")
{
    const int w = 48, h = 48;
    const auto img = fixtures::smooth_image(w, h, 0.3);
    const auto m = fixtures::grid_mesh(4, 4, {0}, 0.2, 2, 0.25, 0.75, 0.25, 0.75);
    Rng rng(3);
    Positions v = m.vertices() + 0.01 * Positions::Random(m.vertex_count(), 2);

    RasterImage zero(w, h);
    CHECK(warp_gradient(img, m, v, zero).isZero(0.0));
    RasterImage flat(w, h);
    flat.fill({0.3, 0.3, 0.3, 1.0});
    RasterImage g(w, h);
    for (auto& x : g.data()) x = rng.normal();
    CHECK(warp_gradient(flat, m, v, g).norm() < 1e-12);

    RasterImage g2 = g;
    for (auto& x : g2.data()) x *= 2.5;
    CHECK((warp_gradient(img, m, v, g2) - 2.5 * warp_gradient(img, m, v, g)).norm() < 1e-9);

    // Weighting by a smooth window keeps border coverage changes out of the check.
    RasterImage wgt(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double u = (x + 0.5) / w, t = (y + 0.5) / h;
            const double win = std::exp(-((u - 0.5) * (u - 0.5) + (t - 0.5) * (t - 0.5)) / 0.005);
            for (int c = 0; c < 4; ++c) wgt.at(x, y, c) = win * (c + 1);
        }
    auto loss = [&](const Positions& p) {
        const auto out = warp(img, m, p);
        double s = 0;
        for (std::size_t i = 0; i < out.size(); ++i) s += out.data()[i] * wgt.data()[i];
        return s;
    };
    const Positions grad = warp_gradient(img, m, v, wgt);
    const Positions dir = Positions::Random(m.vertex_count(), 2);
    const double step = 1e-3 / w;
    const double fd = (loss(v + step * dir) - loss(v - step * dir)) / (2 * step);
    const double an = (grad.array() * dir.array()).sum();
    CHECK(fixtures::rel_err(an, fd) < 5e-2);
}

TEST_CASE("PNG round trip and frame emission")
{
    const auto dir = std::filesystem::temp_directory_path() / "flexmesh_png";
    std::filesystem::remove_all(dir);
    auto img = fixtures::smooth_image(10, 7);
    img.at(3, 3, 3) = 0.0;
    save_png(img, dir.string() + "_single.png");
    const auto back = load_png(dir.string() + "_single.png");
    CHECK(back.to_rgba8() == img.to_rgba8());
    CHECK_CODE(load_png(dir / "nope.png"), ErrorCode::Io);
    {
        std::ofstream(dir.string() + "_bad.png") << "garbage";
    }
    CHECK_CODE(load_png(dir.string() + "_bad.png"), ErrorCode::Parse);

    emit_frames({img}, dir / "one");
    CHECK(std::filesystem::exists(dir / "one" / "frame_0000.png"));
    emit_frames(std::vector<RasterImage>(24, img), dir / "many");
    CHECK(std::filesystem::exists(dir / "many" / "frame_0023.png"));
    CHECK_CODE(emit_frames({}, dir / "none"), ErrorCode::InvalidArgument);
    CHECK_CODE(emit_frames({img, RasterImage(3, 3)}, dir / "ragged"), ErrorCode::ShapeMismatch);
}

TEST_CASE("GIF encoding is deterministic with the requested duration")
{
    std::vector<RasterImage> frames;
    for (int t = 0; t < 24; ++t) frames.push_back(fixtures::smooth_image(20, 16, 0.2 * t));
    const auto a = encode_gif(frames, 8.0);
    const auto b = encode_gif(frames, 8.0);
    CHECK(a == b);
    CHECK(std::string(a.begin(), a.begin() + 6) == "GIF89a");
    CHECK(a.back() == 0x3B);

    // Sum the graphic control extension delays.
    int total = 0, count = 0;
    for (std::size_t i = 0; i + 5 < a.size(); ++i)
        if (a[i] == 0x21 && a[i + 1] == 0xF9 && a[i + 2] == 4) {
            total += a[i + 4] | (a[i + 5] << 8);
            ++count;
        }
    CHECK(count == 24);
    CHECK(total == 300); // 24 frames at 8 fps = 3 s
    CHECK_CODE(encode_gif({}, 8.0), ErrorCode::InvalidArgument);
    CHECK_CODE(encode_gif(frames, 0.0), ErrorCode::InvalidArgument);

    const auto path = std::filesystem::temp_directory_path() / "flexmesh_test.gif";
    emit_gif(frames, path, 8.0);
    CHECK(std::filesystem::file_size(path) == a.size());
}
