#pragma once

#include <Eigen/Core>

#include <array>
#include <vector>

namespace flexmesh::render {

/// RGBA image with a floating-point workspace in [0, 1], row-major,
/// interleaved channels. Quantized to 8 bits only on output.
class RasterImage
{
public:
    static constexpr int kChannels = 4;

    RasterImage() = default;
    RasterImage(int width, int height);

    int width() const { return m_width; }
    int height() const { return m_height; }
    bool empty() const { return m_width == 0 || m_height == 0; }
    std::size_t size() const { return m_data.size(); }

    double& at(int x, int y, int c) { return m_data[index(x, y, c)]; }
    double at(int x, int y, int c) const { return m_data[index(x, y, c)]; }

    std::vector<double>& data() { return m_data; }
    const std::vector<double>& data() const { return m_data; }

    void fill(const std::array<double, 4>& rgba);

    /// Bilinear sample at continuous pixel coordinates (pixel centers at
    /// integer positions) with edge clamping. Optionally returns the
    /// derivative of each channel with respect to (sx, sy).
    std::array<double, 4> sample(double sx, double sy, std::array<Eigen::Vector2d, 4>* grad = nullptr) const;

    bool operator==(const RasterImage& o) const
    {
        return m_width == o.m_width && m_height == o.m_height && m_data == o.m_data;
    }

    /// Round-to-nearest 8-bit quantization with clamping.
    std::vector<unsigned char> to_rgba8() const;
    static RasterImage from_rgba8(int width, int height, const std::vector<unsigned char>& bytes);

private:
    std::size_t index(int x, int y, int c) const
    {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(m_width) + static_cast<std::size_t>(x)) *
                   kChannels +
               static_cast<std::size_t>(c);
    }

    int m_width = 0;
    int m_height = 0;
    std::vector<double> m_data;
};

} // namespace flexmesh::render
