#pragma once

#include <Eigen/Core>

#include <cmath>
#include <vector>

namespace flexmesh {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Row-per-vertex 2D positions.
using Positions = Eigen::Matrix<double, Eigen::Dynamic, 2>;

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m)
{
    return m.allFinite();
}

inline bool all_finite(const std::vector<double>& v)
{
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace flexmesh
