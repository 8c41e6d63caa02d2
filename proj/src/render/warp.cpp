#include "render/warp.hpp"

#include "common/error.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <string>

namespace flexmesh::render {

namespace {

/// Pixel ownership after rasterizing every deformed face in order.
struct Coverage
{
    int width = 0;
    int height = 0;
    std::vector<int> owner;       // face index or -1
    std::vector<Eigen::Vector3d> bary;
    int inverted = 0;
};

Coverage rasterize(const mesh::TriMesh& rest, const Positions& deformed, int width, int height)
{
    require(deformed.rows() == rest.vertex_count(), ErrorCode::ShapeMismatch,
            "deformed vertex count " + std::to_string(deformed.rows()) + " does not match mesh (" +
                std::to_string(rest.vertex_count()) + ")");
    require(all_finite(deformed), ErrorCode::NonFinite, "deformed vertices contain non-finite values");
    Coverage cov;
    cov.width = width;
    cov.height = height;
    cov.owner.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), -1);
    cov.bary.resize(cov.owner.size());

    for (int f = 0; f < rest.face_count(); ++f) {
        const auto& t = rest.faces()[static_cast<std::size_t>(f)];
        const Vec2 d0 = deformed.row(t[0]).transpose();
        const Vec2 d1 = deformed.row(t[1]).transpose();
        const Vec2 d2 = deformed.row(t[2]).transpose();
        const double area = mesh::signed_area(d0, d1, d2);
        if (std::abs(area) <= mesh::kDegenerateArea) continue;
        if (area < 0) ++cov.inverted;

        Mat2 m;
        m.col(0) = d1 - d0;
        m.col(1) = d2 - d0;
        const Mat2 minv = m.inverse();

        const double minx = std::min({d0.x(), d1.x(), d2.x()}) * width - 0.5;
        const double maxx = std::max({d0.x(), d1.x(), d2.x()}) * width - 0.5;
        const double miny = std::min({d0.y(), d1.y(), d2.y()}) * height - 0.5;
        const double maxy = std::max({d0.y(), d1.y(), d2.y()}) * height - 0.5;
        const int px0 = std::max(0, static_cast<int>(std::ceil(minx)));
        const int px1 = std::min(width - 1, static_cast<int>(std::floor(maxx)));
        const int py0 = std::max(0, static_cast<int>(std::ceil(miny)));
        const int py1 = std::min(height - 1, static_cast<int>(std::floor(maxy)));

        constexpr double eps = 1e-12;
        for (int py = py0; py <= py1; ++py) {
            for (int px = px0; px <= px1; ++px) {
                const Vec2 q((px + 0.5) / width, (py + 0.5) / height);
                const Vec2 b = minv * (q - d0);
                const double b0 = 1.0 - b.x() - b.y();
                if (b0 < -eps || b.x() < -eps || b.y() < -eps) continue;
                const std::size_t i = static_cast<std::size_t>(py) * static_cast<std::size_t>(width) +
                                      static_cast<std::size_t>(px);
                cov.owner[i] = f;
                cov.bary[i] = Eigen::Vector3d(b0, b.x(), b.y());
            }
        }
    }
    return cov;
}

} // namespace

RasterImage warp(const RasterImage& image, const mesh::TriMesh& rest, const Positions& deformed, int out_width,
                 int out_height, WarpStats* stats)
{
    require(!image.empty(), ErrorCode::InvalidArgument, "cannot warp an empty image");
    const int w = out_width > 0 ? out_width : image.width();
    const int h = out_height > 0 ? out_height : image.height();
    const Coverage cov = rasterize(rest, deformed, w, h);

    RasterImage out(w, h);
    int covered = 0;
    for (int py = 0; py < h; ++py) {
        for (int px = 0; px < w; ++px) {
            const std::size_t i = static_cast<std::size_t>(py) * static_cast<std::size_t>(w) + static_cast<std::size_t>(px);
            const int f = cov.owner[i];
            if (f < 0) continue;
            ++covered;
            const auto& t = rest.faces()[static_cast<std::size_t>(f)];
            const Eigen::Vector3d& b = cov.bary[i];
            const Vec2 r = b[0] * rest.vertex(t[0]) + b[1] * rest.vertex(t[1]) + b[2] * rest.vertex(t[2]);
            const auto v = image.sample(r.x() * image.width() - 0.5, r.y() * image.height() - 0.5);
            for (int c = 0; c < RasterImage::kChannels; ++c) out.at(px, py, c) = v[static_cast<std::size_t>(c)];
        }
    }
    if (stats) {
        stats->inverted_faces = cov.inverted;
        stats->covered_pixels = covered;
    }
    return out;
}

Positions warp_gradient(const RasterImage& image, const mesh::TriMesh& rest, const Positions& deformed,
                        const RasterImage& grad_frame)
{
    require(!grad_frame.empty(), ErrorCode::InvalidArgument, "gradient frame is empty");
    const int w = grad_frame.width();
    const int h = grad_frame.height();
    const Coverage cov = rasterize(rest, deformed, w, h);

    // Per-face constant: Mr * M^-1 maps deformed offsets to rest offsets.
    std::vector<Mat2> back(static_cast<std::size_t>(rest.face_count()), Mat2::Zero());
    for (int f = 0; f < rest.face_count(); ++f) {
        const auto& t = rest.faces()[static_cast<std::size_t>(f)];
        Mat2 m, mr;
        m.col(0) = (deformed.row(t[1]) - deformed.row(t[0])).transpose();
        m.col(1) = (deformed.row(t[2]) - deformed.row(t[0])).transpose();
        mr.col(0) = rest.vertex(t[1]) - rest.vertex(t[0]);
        mr.col(1) = rest.vertex(t[2]) - rest.vertex(t[0]);
        if (std::abs(m.determinant()) > 2 * mesh::kDegenerateArea) back[static_cast<std::size_t>(f)] = mr * m.inverse();
    }

    Positions grad = Positions::Zero(deformed.rows(), 2);
    const Eigen::Vector2d pixel_scale(image.width(), image.height());
    for (int py = 0; py < h; ++py) {
        for (int px = 0; px < w; ++px) {
            const std::size_t i = static_cast<std::size_t>(py) * static_cast<std::size_t>(w) + static_cast<std::size_t>(px);
            const int f = cov.owner[i];
            if (f < 0) continue;
            const auto& t = rest.faces()[static_cast<std::size_t>(f)];
            const Eigen::Vector3d& b = cov.bary[i];
            const Vec2 r = b[0] * rest.vertex(t[0]) + b[1] * rest.vertex(t[1]) + b[2] * rest.vertex(t[2]);
            std::array<Eigen::Vector2d, 4> dsample;
            image.sample(r.x() * image.width() - 0.5, r.y() * image.height() - 0.5, &dsample);

            // dLoss/dr (normalized rest coordinates)
            Vec2 dr = Vec2::Zero();
            for (int c = 0; c < RasterImage::kChannels; ++c)
                dr += grad_frame.at(px, py, c) * dsample[static_cast<std::size_t>(c)].cwiseProduct(pixel_scale);
            if (dr.isZero(0.0)) continue;

            // dr/dD_k = -b_k (Mr M^-1)
            const Vec2 row = back[static_cast<std::size_t>(f)].transpose() * dr;
            for (int k = 0; k < 3; ++k) grad.row(t[static_cast<std::size_t>(k)]) -= b[k] * row.transpose();
        }
    }
    return grad;
}

} // namespace flexmesh::render
