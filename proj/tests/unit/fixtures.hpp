#pragma once

#include "common/error.hpp"
#include "common/rng.hpp"
#include "mesh/tri_mesh.hpp"
#include "render/raster_image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#define CHECK_CODE(expr, ec)                                                                                    \
    do {                                                                                                               \
        bool thrown_ = false;                                                                                          \
        try {                                                                                                          \
            (void)(expr);                                                                                              \
        } catch (const flexmesh::Error& e_) {                                                                          \
            thrown_ = true;                                                                                            \
            CHECK_MESSAGE(e_.code() == (ec), e_.what());                                                               \
        }                                                                                                              \
        CHECK_MESSAGE(thrown_, #expr " did not throw");                                                                \
    } while (0)

namespace fixtures {

using flexmesh::Positions;

/// nx x ny vertex grid spanning [x0, x1] x [y0, y1], interior vertices
/// jittered by up to `jitter` cell widths, counter-clockwise in y-down
/// image coordinates (positive signed area).
inline flexmesh::mesh::TriMesh grid_mesh(int nx, int ny, std::vector<int> keypoints, double jitter = 0.0,
                                         std::uint64_t seed = 1, double x0 = 0.2, double x1 = 0.8, double y0 = 0.2,
                                         double y1 = 0.8)
{
    flexmesh::Rng rng(seed);
    Positions v(nx * ny, 2);
    const double hx = (x1 - x0) / (nx - 1);
    const double hy = (y1 - y0) / (ny - 1);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            double x = x0 + i * hx;
            double y = y0 + j * hy;
            if (i > 0 && i + 1 < nx && j > 0 && j + 1 < ny) {
                x += jitter * hx * rng.uniform(-1, 1);
                y += jitter * hy * rng.uniform(-1, 1);
            }
            v.row(j * nx + i) << x, y;
        }
    std::vector<flexmesh::mesh::Face> faces;
    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) {
            const int a = j * nx + i, b = a + 1, c = a + nx, d = c + 1;
            faces.push_back({a, b, d});
            faces.push_back({a, d, c});
        }
    // Orient every face positively.
    for (auto& f : faces) {
        const flexmesh::Vec2 p0 = v.row(f[0]).transpose(), p1 = v.row(f[1]).transpose(), p2 = v.row(f[2]).transpose();
        if (flexmesh::mesh::signed_area(p0, p1, p2) < 0) std::swap(f[1], f[2]);
    }
    return flexmesh::mesh::TriMesh(v, faces, std::move(keypoints));
}

/// Random grid mesh with vertex count <= max_vertices and a few keypoints.
inline flexmesh::mesh::TriMesh random_mesh(flexmesh::Rng& rng, int max_vertices = 200)
{
    int nx = 0, ny = 0;
    do {
        nx = 3 + static_cast<int>(rng.uniform() * 12);
        ny = 3 + static_cast<int>(rng.uniform() * 12);
    } while (nx * ny > max_vertices);
    std::vector<int> ids(static_cast<std::size_t>(nx * ny));
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), rng.engine());
    const int k = 1 + static_cast<int>(rng.uniform() * 4);
    ids.resize(static_cast<std::size_t>(k));
    return grid_mesh(nx, ny, ids, 0.3, rng.engine()());
}

/// Smooth, opaque, low-frequency RGBA test image.
inline flexmesh::render::RasterImage smooth_image(int w, int h, double phase = 0.0)
{
    flexmesh::render::RasterImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double u = (x + 0.5) / w, v = (y + 0.5) / h;
            img.at(x, y, 0) = 0.5 + 0.4 * std::sin(2 * M_PI * u + phase) * std::cos(M_PI * v);
            img.at(x, y, 1) = 0.5 + 0.4 * std::cos(2 * M_PI * (u + v) + phase);
            img.at(x, y, 2) = 0.5 + 0.4 * std::sin(3 * M_PI * v - phase) * std::sin(M_PI * u);
            img.at(x, y, 3) = 1.0;
        }
    return img;
}

inline double rel_err(double a, double b, double floor = 1e-12)
{
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

} // namespace fixtures
