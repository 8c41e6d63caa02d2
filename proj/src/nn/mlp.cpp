#include "nn/mlp.hpp"

#include "common/error.hpp"
#include "common/rng.hpp"

#include <cmath>

namespace flexmesh::nn {

Mlp::Mlp(std::string prefix, std::vector<int> sizes, double slope)
    : m_prefix(std::move(prefix))
    , m_sizes(std::move(sizes))
    , m_slope(slope)
{
    require(m_sizes.size() >= 2, ErrorCode::InvalidArgument, "an MLP needs at least one layer");
    for (int s : m_sizes) require(s > 0, ErrorCode::InvalidArgument, "MLP layer sizes must be positive");
}

std::string Mlp::weight_name(int layer) const { return m_prefix + ".W" + std::to_string(layer); }
std::string Mlp::bias_name(int layer) const { return m_prefix + ".b" + std::to_string(layer); }

void Mlp::init(ParamStore& params, Rng& rng, bool zero_final) const
{
    for (int l = 0; l < layer_count(); ++l) {
        const int in = m_sizes[static_cast<std::size_t>(l)];
        const int out = m_sizes[static_cast<std::size_t>(l + 1)];
        Matrix& w = params.create(weight_name(l), in, out);
        params.create(bias_name(l), 1, out);
        if (zero_final && l == layer_count() - 1) continue;
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-bound, bound);
    }
}

void Mlp::check_shapes(const ParamStore& params) const
{
    for (int l = 0; l < layer_count(); ++l) {
        const Matrix& w = params.get(weight_name(l));
        const Matrix& b = params.get(bias_name(l));
        const int in = m_sizes[static_cast<std::size_t>(l)];
        const int out = m_sizes[static_cast<std::size_t>(l + 1)];
        if (w.rows() != in || w.cols() != out || b.rows() != 1 || b.cols() != out)
            fail(ErrorCode::ShapeMismatch, "parameters of layer " + std::to_string(l) + " of '" +
                                               m_prefix + "' do not match the layer sizes");
    }
}

Matrix Mlp::forward(const ParamStore& params, const Matrix& input, MlpTape* tape) const
{
    check_shapes(params);
    require(input.cols() == input_size(), ErrorCode::ShapeMismatch,
            "MLP '" + m_prefix + "' expects " + std::to_string(input_size()) + " inputs, got " +
                std::to_string(input.cols()));
    if (tape) {
        tape->inputs.clear();
        tape->preacts.clear();
    }
    Matrix x = input;
    for (int l = 0; l < layer_count(); ++l) {
        Matrix z = x * params.get(weight_name(l));
        z.rowwise() += params.get(bias_name(l)).row(0);
        if (tape) {
            tape->inputs.push_back(x);
            tape->preacts.push_back(z);
        }
        if (l + 1 < layer_count())
            x = z.unaryExpr([s = m_slope](double v) { return v > 0 ? v : s * v; });
        else
            x = std::move(z);
    }
    return x;
}

Matrix Mlp::backward(const ParamStore& params, const MlpTape& tape, const Matrix& grad_output,
                     GradStore& grads) const
{
    require(static_cast<int>(tape.inputs.size()) == layer_count(), ErrorCode::InvalidArgument,
            "tape does not belong to MLP '" + m_prefix + "'");
    Matrix g = grad_output;
    for (int l = layer_count() - 1; l >= 0; --l) {
        const Matrix& z = tape.preacts[static_cast<std::size_t>(l)];
        require(g.rows() == z.rows() && g.cols() == z.cols(), ErrorCode::ShapeMismatch,
                "upstream gradient shape mismatch in MLP '" + m_prefix + "'");
        if (l + 1 < layer_count())
            g = g.cwiseProduct(z.unaryExpr([s = m_slope](double v) { return v > 0 ? 1.0 : s; }));
        const Matrix& x = tape.inputs[static_cast<std::size_t>(l)];
        const Matrix& w = params.get(weight_name(l));
        grads.at(weight_name(l), w.rows(), w.cols()) += x.transpose() * g;
        grads.at(bias_name(l), 1, w.cols()) += g.colwise().sum();
        g = g * w.transpose();
    }
    return g;
}

} // namespace flexmesh::nn
