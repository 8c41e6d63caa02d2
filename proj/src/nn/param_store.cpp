#include "nn/param_store.hpp"

#include "common/error.hpp"

#include <cmath>

namespace flexmesh::nn {

Matrix& GradStore::at(const std::string& name, Eigen::Index rows, Eigen::Index cols)
{
    auto it = m_grads.find(name);
    if (it == m_grads.end()) it = m_grads.emplace(name, Matrix::Zero(rows, cols)).first;
    require(it->second.rows() == rows && it->second.cols() == cols, ErrorCode::ShapeMismatch,
            "gradient '" + name + "' requested with a different shape");
    return it->second;
}

const Matrix* GradStore::find(const std::string& name) const
{
    auto it = m_grads.find(name);
    return it == m_grads.end() ? nullptr : &it->second;
}

GradStore& GradStore::operator+=(const GradStore& o)
{
    for (const auto& [name, g] : o.m_grads) at(name, g.rows(), g.cols()) += g;
    return *this;
}

Matrix& ParamStore::create(const std::string& name, Eigen::Index rows, Eigen::Index cols)
{
    require(rows > 0 && cols > 0, ErrorCode::InvalidArgument, "parameter '" + name + "' has an empty shape");
    auto [it, inserted] = m_entries.emplace(
        name, Entry{Matrix::Zero(rows, cols), Matrix::Zero(rows, cols), Matrix::Zero(rows, cols)});
    require(inserted, ErrorCode::InvalidArgument, "parameter '" + name + "' already exists");
    return it->second.value;
}

const ParamStore::Entry& ParamStore::entry(const std::string& name) const
{
    auto it = m_entries.find(name);
    if (it == m_entries.end()) fail(ErrorCode::InvalidArgument, "unknown parameter '" + name + "'");
    return it->second;
}

const Matrix& ParamStore::get(const std::string& name) const { return entry(name).value; }

Matrix& ParamStore::get_mut(const std::string& name)
{
    return const_cast<Entry&>(entry(name)).value;
}

const Matrix& ParamStore::first_moment(const std::string& name) const { return entry(name).m; }
const Matrix& ParamStore::second_moment(const std::string& name) const { return entry(name).v; }

std::vector<std::string> ParamStore::names() const
{
    std::vector<std::string> out;
    for (const auto& [name, e] : m_entries) out.push_back(name);
    return out;
}

std::size_t ParamStore::scalar_count() const
{
    std::size_t n = 0;
    for (const auto& [name, e] : m_entries) n += static_cast<std::size_t>(e.value.size());
    return n;
}

void ParamStore::adam_step(const GradStore& grads, const AdamOptions& o)
{
    for (const auto& [name, g] : grads.entries()) {
        auto it = m_entries.find(name);
        require(it != m_entries.end(), ErrorCode::InvalidArgument, "gradient for unknown parameter '" + name + "'");
        require(g.rows() == it->second.value.rows() && g.cols() == it->second.value.cols(),
                ErrorCode::ShapeMismatch, "gradient shape mismatch for '" + name + "'");
        if (!g.allFinite()) fail(ErrorCode::NonFinite, "non-finite gradient for parameter '" + name + "'");
    }

    ++m_step;
    const double bc1 = 1.0 - std::pow(o.beta1, static_cast<double>(m_step));
    const double bc2 = 1.0 - std::pow(o.beta2, static_cast<double>(m_step));
    for (auto& [name, e] : m_entries) {
        const Matrix* g = grads.find(name);
        if (g) {
            e.m = o.beta1 * e.m + (1.0 - o.beta1) * *g;
            e.v = o.beta2 * e.v + (1.0 - o.beta2) * g->cwiseProduct(*g);
        } else {
            e.m *= o.beta1;
            e.v *= o.beta2;
        }
        const Matrix mhat = e.m / bc1;
        const Matrix vhat = e.v / bc2;
        e.value.array() -= o.lr * mhat.array() / (vhat.array().sqrt() + o.eps);
        if (!e.value.allFinite()) fail(ErrorCode::NonFinite, "parameter '" + name + "' became non-finite");
    }
}

std::vector<std::pair<std::string, Matrix>> ParamStore::values() const
{
    std::vector<std::pair<std::string, Matrix>> out;
    for (const auto& [name, e] : m_entries) out.emplace_back(name, e.value);
    return out;
}

void ParamStore::assign(const std::vector<std::pair<std::string, Matrix>>& values)
{
    for (const auto& [name, v] : values) {
        Matrix& dst = get_mut(name);
        require(dst.rows() == v.rows() && dst.cols() == v.cols(), ErrorCode::ShapeMismatch,
                "shape mismatch assigning parameter '" + name + "'");
        dst = v;
    }
}

} // namespace flexmesh::nn
