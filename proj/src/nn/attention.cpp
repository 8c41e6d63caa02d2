#include "nn/attention.hpp"

#include "common/error.hpp"
#include "common/rng.hpp"

#include <cmath>

namespace flexmesh::nn {

Matrix softmax_rows(const Matrix& s)
{
    Matrix out(s.rows(), s.cols());
    for (Eigen::Index r = 0; r < s.rows(); ++r) {
        const double mx = s.row(r).maxCoeff();
        out.row(r) = (s.row(r).array() - mx).exp().matrix();
        out.row(r) /= out.row(r).sum();
    }
    return out;
}

Attention::Attention(std::string prefix, int d_in, int d_out, int heads, int dim_kv)
    : m_prefix(std::move(prefix))
    , m_in(d_in)
    , m_out(d_out)
    , m_heads(heads)
    , m_dk(dim_kv)
{
    require(d_in > 0 && d_out > 0 && heads > 0 && dim_kv > 0, ErrorCode::InvalidArgument,
            "attention dimensions must be positive");
}

void Attention::init(ParamStore& params, Rng& rng) const
{
    const int hd = m_heads * m_dk;
    auto fill = [&rng](Matrix& w, int fan_in) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-bound, bound);
    };
    for (const char* p : {"Wq", "Wk", "Wv"}) fill(params.create(name(p), m_in, hd), m_in);
    for (const char* p : {"bq", "bk", "bv"}) params.create(name(p), 1, hd);
    fill(params.create(name("Wo"), hd, m_out), hd);
    params.create(name("bo"), 1, m_out);
}

Matrix Attention::forward(const ParamStore& params, const Matrix& tokens, AttentionTape* tape) const
{
    require(tokens.rows() >= 1, ErrorCode::InvalidArgument, "attention needs at least one token");
    require(tokens.cols() == m_in, ErrorCode::ShapeMismatch,
            "attention '" + m_prefix + "' expects token width " + std::to_string(m_in));
    const int hd = m_heads * m_dk;
    const Matrix& wq = params.get(name("Wq"));
    require(wq.rows() == m_in && wq.cols() == hd, ErrorCode::ShapeMismatch,
            "attention '" + m_prefix + "' parameters do not match its dimensions");

    auto project = [&](const char* w, const char* b) {
        Matrix y = tokens * params.get(name(w));
        y.rowwise() += params.get(name(b)).row(0);
        return y;
    };
    const Matrix q = project("Wq", "bq");
    const Matrix k = project("Wk", "bk");
    const Matrix v = project("Wv", "bv");

    const double scale = 1.0 / std::sqrt(static_cast<double>(m_dk));
    const Eigen::Index n = tokens.rows();
    Matrix concat(n, hd);
    if (tape) {
        tape->tokens = tokens;
        tape->q.clear();
        tape->k.clear();
        tape->v.clear();
        tape->weights.clear();
    }
    for (int h = 0; h < m_heads; ++h) {
        const Matrix qh = q.middleCols(h * m_dk, m_dk);
        const Matrix kh = k.middleCols(h * m_dk, m_dk);
        const Matrix vh = v.middleCols(h * m_dk, m_dk);
        const Matrix a = softmax_rows(scale * qh * kh.transpose());
        concat.middleCols(h * m_dk, m_dk) = a * vh;
        if (tape) {
            tape->q.push_back(qh);
            tape->k.push_back(kh);
            tape->v.push_back(vh);
            tape->weights.push_back(a);
        }
    }
    if (tape) tape->concat = concat;

    Matrix y = concat * params.get(name("Wo"));
    y.rowwise() += params.get(name("bo")).row(0);
    return y.colwise().mean();
}

Matrix Attention::backward(const ParamStore& params, const AttentionTape& tape, const Matrix& grad_output,
                           GradStore& grads) const
{
    require(grad_output.rows() == 1 && grad_output.cols() == m_out, ErrorCode::ShapeMismatch,
            "attention upstream gradient must be 1 x d_out");
    const Eigen::Index n = tape.tokens.rows();
    const int hd = m_heads * m_dk;
    const double scale = 1.0 / std::sqrt(static_cast<double>(m_dk));

    // mean pooling: every row of y receives grad/n
    const Matrix dy = Matrix::Ones(n, 1) * (grad_output / static_cast<double>(n));
    grads.at(name("Wo"), hd, m_out) += tape.concat.transpose() * dy;
    grads.at(name("bo"), 1, m_out) += dy.colwise().sum();
    const Matrix dconcat = dy * params.get(name("Wo")).transpose();

    Matrix dq(n, hd), dk(n, hd), dv(n, hd);
    for (int h = 0; h < m_heads; ++h) {
        const auto hi = static_cast<std::size_t>(h);
        const Matrix& a = tape.weights[hi];
        const Matrix doh = dconcat.middleCols(h * m_dk, m_dk);
        const Matrix da = doh * tape.v[hi].transpose();
        dv.middleCols(h * m_dk, m_dk) = a.transpose() * doh;
        // softmax Jacobian, row by row
        Matrix ds = a.cwiseProduct(da);
        const Eigen::VectorXd rowdot = ds.rowwise().sum();
        ds -= a.cwiseProduct(rowdot * Eigen::RowVectorXd::Ones(n));
        ds *= scale;
        dq.middleCols(h * m_dk, m_dk) = ds * tape.k[hi];
        dk.middleCols(h * m_dk, m_dk) = ds.transpose() * tape.q[hi];
    }

    Matrix dtokens = Matrix::Zero(n, m_in);
    const struct
    {
        const char* w;
        const char* b;
        const Matrix& d;
    } parts[] = {{"Wq", "bq", dq}, {"Wk", "bk", dk}, {"Wv", "bv", dv}};
    for (const auto& p : parts) {
        grads.at(name(p.w), m_in, hd) += tape.tokens.transpose() * p.d;
        grads.at(name(p.b), 1, hd) += p.d.colwise().sum();
        dtokens += p.d * params.get(name(p.w)).transpose();
    }
    return dtokens;
}

} // namespace flexmesh::nn
