#pragma once

#include "nn/param_store.hpp"

#include <string>
#include <vector>

namespace flexmesh {
class Rng;
}

namespace flexmesh::nn {

struct AttentionTape
{
    Matrix tokens;
    std::vector<Matrix> q, k, v, weights; // per head
    Matrix concat;                        // n x (heads * dim_kv)
};

/// Multi-head scaled dot-product self-attention over a token window,
/// followed by an output projection and mean pooling over tokens. The
/// pooled vector has fixed length whatever the window size and is invariant
/// to token order.
///
/// Parameters: "<prefix>.Wq|Wk|Wv" (d_in x heads*dim_kv), "<prefix>.bq|bk|bv"
/// (1 x heads*dim_kv), "<prefix>.Wo" (heads*dim_kv x d_out), "<prefix>.bo".
class Attention
{
public:
    Attention(std::string prefix, int d_in, int d_out, int heads = 2, int dim_kv = 32);

    const std::string& prefix() const { return m_prefix; }
    int input_size() const { return m_in; }
    int output_size() const { return m_out; }
    int heads() const { return m_heads; }
    int dim_kv() const { return m_dk; }

    void init(ParamStore& params, Rng& rng) const;

    /// tokens: n x d_in with n >= 1; returns 1 x d_out.
    Matrix forward(const ParamStore& params, const Matrix& tokens, AttentionTape* tape = nullptr) const;

    /// Accumulates parameter gradients and returns dLoss/dtokens (n x d_in).
    Matrix backward(const ParamStore& params, const AttentionTape& tape, const Matrix& grad_output,
                    GradStore& grads) const;

private:
    std::string name(const char* suffix) const { return m_prefix + "." + suffix; }

    std::string m_prefix;
    int m_in, m_out, m_heads, m_dk;
};

/// Row-wise softmax with max subtraction.
Matrix softmax_rows(const Matrix& s);

} // namespace flexmesh::nn
