#pragma once

#include "nn/param_store.hpp"

#include <string>
#include <vector>

namespace flexmesh {
class Rng;
}

namespace flexmesh::nn {

inline constexpr double kLeakySlope = 0.01;

/// Activations recorded by a forward pass, consumed by backward().
struct MlpTape
{
    std::vector<Matrix> inputs;      // input to each layer
    std::vector<Matrix> preacts;     // pre-activation of each layer
};

/// Fully connected network over row-batched inputs. Hidden layers use
/// LeakyReLU, the final layer is linear. Layer i owns "<prefix>.W<i>"
/// (in x out) and "<prefix>.b<i>" (1 x out).
class Mlp
{
public:
    Mlp(std::string prefix, std::vector<int> sizes, double slope = kLeakySlope);

    const std::string& prefix() const { return m_prefix; }
    const std::vector<int>& sizes() const { return m_sizes; }
    int layer_count() const { return static_cast<int>(m_sizes.size()) - 1; }
    int input_size() const { return m_sizes.front(); }
    int output_size() const { return m_sizes.back(); }

    std::string weight_name(int layer) const;
    std::string bias_name(int layer) const;

    /// Registers parameters: uniform +-1/sqrt(fan_in) weights, zero biases,
    /// and an all-zero final layer when `zero_final` is set.
    void init(ParamStore& params, Rng& rng, bool zero_final) const;

    Matrix forward(const ParamStore& params, const Matrix& input, MlpTape* tape = nullptr) const;

    /// Accumulates parameter gradients into `grads` and returns dLoss/dinput.
    Matrix backward(const ParamStore& params, const MlpTape& tape, const Matrix& grad_output,
                    GradStore& grads) const;

private:
    void check_shapes(const ParamStore& params) const;

    std::string m_prefix;
    std::vector<int> m_sizes;
    double m_slope;
};

} // namespace flexmesh::nn
