#pragma once

#include "common/rng.hpp"
#include "nn/param_store.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace gradcheck {

using flexmesh::nn::GradStore;
using flexmesh::nn::Matrix;
using flexmesh::nn::ParamStore;

struct Result
{
    double analytic = 0;
    double numeric = 0;
    double rel = 0;
};

inline double rel(double a, double b)
{
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-10});
}

/// Directional derivative along a random direction over every parameter,
/// analytic <grad, d> against a central difference.
inline Result params(ParamStore& p, const GradStore& grads, const std::function<double(const ParamStore&)>& loss,
                     flexmesh::Rng& rng, double h = 1e-6)
{
    auto base = p.values();
    auto dir = base;
    Result r;
    for (auto& [name, m] : dir) {
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
        if (const Matrix* g = grads.find(name)) r.analytic += (g->array() * m.array()).sum();
    }
    auto shifted = [&](double s) {
        auto v = base;
        for (std::size_t k = 0; k < v.size(); ++k) v[k].second += s * dir[k].second;
        p.assign(v);
        return loss(p);
    };
    r.numeric = (shifted(h) - shifted(-h)) / (2 * h);
    p.assign(base);
    r.rel = rel(r.analytic, r.numeric);
    return r;
}

} // namespace gradcheck
