#include "render/raster_image.hpp"

#include "common/error.hpp"

#include <algorithm>
#include <cmath>

namespace flexmesh::render {

RasterImage::RasterImage(int width, int height)
    : m_width(width)
    , m_height(height)
{
    require(width >= 1 && height >= 1, ErrorCode::InvalidArgument, "image dimensions must be >= 1");
    m_data.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * kChannels, 0.0);
}

void RasterImage::fill(const std::array<double, 4>& rgba)
{
    for (std::size_t i = 0; i < m_data.size(); ++i) m_data[i] = rgba[i % kChannels];
}

std::array<double, 4> RasterImage::sample(double sx, double sy, std::array<Eigen::Vector2d, 4>* grad) const
{
    const double fx0 = std::floor(sx);
    const double fy0 = std::floor(sy);
    const double tx = sx - fx0;
    const double ty = sy - fy0;
    auto clampi = [](double v, int hi) { return static_cast<int>(std::clamp(v, 0.0, static_cast<double>(hi))); };
    const int x0 = clampi(fx0, m_width - 1);
    const int x1 = clampi(fx0 + 1, m_width - 1);
    const int y0 = clampi(fy0, m_height - 1);
    const int y1 = clampi(fy0 + 1, m_height - 1);

    std::array<double, 4> out{};
    for (int c = 0; c < kChannels; ++c) {
        const double a = at(x0, y0, c);
        const double b = at(x1, y0, c);
        const double d = at(x0, y1, c);
        const double e = at(x1, y1, c);
        const double top = a + tx * (b - a);
        const double bot = d + tx * (e - d);
        out[static_cast<std::size_t>(c)] = top + ty * (bot - top);
        if (grad) {
            (*grad)[static_cast<std::size_t>(c)] =
                Eigen::Vector2d((1 - ty) * (b - a) + ty * (e - d), bot - top);
        }
    }
    return out;
}

std::vector<unsigned char> RasterImage::to_rgba8() const
{
    std::vector<unsigned char> out(m_data.size());
    for (std::size_t i = 0; i < m_data.size(); ++i)
        out[i] = static_cast<unsigned char>(std::lround(std::clamp(m_data[i], 0.0, 1.0) * 255.0));
    return out;
}

RasterImage RasterImage::from_rgba8(int width, int height, const std::vector<unsigned char>& bytes)
{
    RasterImage img(width, height);
    require(bytes.size() == img.m_data.size(), ErrorCode::ShapeMismatch, "RGBA8 buffer size mismatch");
    for (std::size_t i = 0; i < bytes.size(); ++i) img.m_data[i] = bytes[i] / 255.0;
    return img;
}

} // namespace flexmesh::render
