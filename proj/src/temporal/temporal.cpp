#include "temporal/temporal.hpp"

#include "common/error.hpp"

#include <algorithm>
#include <numbers>
#include <string>

namespace flexmesh::temporal {

TemporalState TemporalState::from_spatial(std::vector<JacobianField> spatial, int window)
{
    require(window >= 1, ErrorCode::InvalidArgument, "temporal window must be >= 1");
    TemporalState s;
    s.window = window;
    const std::size_t faces = spatial.empty() ? 0 : spatial.front().size();
    s.temporal.assign(spatial.size(), JacobianField(faces));
    s.spatial = std::move(spatial);
    return s;
}

WindowRange spatial_window(int t, int window) { return {std::max(0, t - window + 1), t}; }

WindowRange temporal_window(int t, int window)
{
    if (t == 0) return {0, 0};
    return {std::max(0, t - window), t - 1};
}

nn::Matrix frame_token(const JacobianField& field)
{
    require(field.size() > 0, ErrorCode::InvalidArgument, "cannot tokenize an empty field");
    Mat2 mean = Mat2::Zero();
    for (const auto& m : field.per_face) mean += m;
    mean /= static_cast<double>(field.size());
    nn::Matrix tok(1, 4);
    tok << mean(0, 0), mean(0, 1), mean(1, 0), mean(1, 1);
    return tok;
}

Eigen::RowVectorXd time_features(double u, int frequencies)
{
    Eigen::RowVectorXd f(2 * frequencies);
    for (int k = 0; k < frequencies; ++k) {
        const double w = std::numbers::pi * (k + 1);
        f[2 * k] = std::sin(w * u);
        f[2 * k + 1] = std::cos(w * u);
    }
    return f;
}

namespace {

nn::Matrix window_tokens(const std::vector<JacobianField>& frames, WindowRange r)
{
    nn::Matrix tokens(r.last - r.first + 1, 4);
    for (int k = r.first; k <= r.last; ++k) tokens.row(k - r.first) = frame_token(frames[static_cast<std::size_t>(k)]);
    return tokens;
}

void check_state(const TemporalState& state)
{
    require(state.frame_count() >= 2, ErrorCode::InvalidArgument, "temporal integration needs at least 2 frames");
    require(state.temporal.size() == state.spatial.size(), ErrorCode::ShapeMismatch,
            "temporal and spatial frame counts differ");
    require(state.window >= 1, ErrorCode::InvalidArgument, "temporal window must be >= 1");
    const std::size_t faces = state.spatial.front().size();
    for (std::size_t t = 0; t < state.spatial.size(); ++t)
        require(state.spatial[t].size() == faces && state.temporal[t].size() == faces, ErrorCode::ShapeMismatch,
                "frame " + std::to_string(t) + " has a different face count");
}

void euler_step(TemporalState& state, int t, double h, const JacobianField& rate)
{
    auto& next = state.temporal[static_cast<std::size_t>(t + 1)];
    next = state.temporal[static_cast<std::size_t>(t)];
    for (std::size_t f = 0; f < next.size(); ++f) next[f] += h * rate[f];
    if (!next.is_finite())
        fail(ErrorCode::NonFinite, "temporal integration produced non-finite values at frame " + std::to_string(t + 1));
}

} // namespace

TemporalModel::TemporalModel(TemporalConfig config)
    : m_config(config)
    , m_enc_p("temporal.enc_p", 4, config.encoding_dim, config.heads, config.dim_kv)
    , m_enc_r("temporal.enc_r", 4, config.encoding_dim, config.heads, config.dim_kv)
    , m_rate("temporal.f_r",
             {4 + 2 * config.encoding_dim + 2 * config.time_frequencies, config.hidden, config.hidden, 4})
{
    require(config.window >= 1, ErrorCode::InvalidArgument, "temporal window must be >= 1");
}

void TemporalModel::init(nn::ParamStore& params, Rng& rng) const
{
    m_enc_p.init(params, rng);
    m_enc_r.init(params, rng);
    m_rate.init(params, rng, true);
}

nn::Matrix TemporalModel::encode_spatial_window(const TemporalState& state, int t, const nn::ParamStore& params,
                                                nn::AttentionTape* tape) const
{
    require(t >= 0 && t < state.frame_count(), ErrorCode::IndexOutOfRange, "frame index out of range");
    return m_enc_p.forward(params, window_tokens(state.spatial, spatial_window(t, state.window)), tape);
}

nn::Matrix TemporalModel::encode_temporal_window(const TemporalState& state, int t, const nn::ParamStore& params,
                                                 nn::AttentionTape* tape) const
{
    require(t >= 0 && t < state.frame_count(), ErrorCode::IndexOutOfRange, "frame index out of range");
    return m_enc_r.forward(params, window_tokens(state.temporal, temporal_window(t, state.window)), tape);
}

JacobianField TemporalModel::ode_rhs(const JacobianField& base, const nn::Matrix& enc_p, const nn::Matrix& enc_r,
                                     double u, const nn::ParamStore& params, nn::MlpTape* tape) const
{
    const int enc = m_config.encoding_dim;
    require(enc_p.rows() == 1 && enc_p.cols() == enc && enc_r.rows() == 1 && enc_r.cols() == enc,
            ErrorCode::ShapeMismatch, "encodings must be 1 x " + std::to_string(enc));
    const auto nf = static_cast<Eigen::Index>(base.size());
    nn::Matrix input(nf, m_rate.input_size());
    const Eigen::RowVectorXd tf = time_features(u, m_config.time_frequencies);
    for (Eigen::Index f = 0; f < nf; ++f) {
        const Mat2& j = base[static_cast<std::size_t>(f)];
        input(f, 0) = j(0, 0);
        input(f, 1) = j(0, 1);
        input(f, 2) = j(1, 0);
        input(f, 3) = j(1, 1);
    }
    input.middleCols(4, enc) = enc_p.replicate(nf, 1);
    input.middleCols(4 + enc, enc) = enc_r.replicate(nf, 1);
    input.rightCols(tf.size()) = tf.replicate(nf, 1);

    const nn::Matrix out = m_rate.forward(params, input, tape);
    JacobianField rates(base.size());
    for (Eigen::Index f = 0; f < nf; ++f) rates[static_cast<std::size_t>(f)] << out(f, 0), out(f, 1), out(f, 2), out(f, 3);
    return rates;
}

void TemporalModel::integrate(TemporalState& state, const nn::ParamStore& params, IntegrationTape* tape) const
{
    check_state(state);
    const int n = state.frame_count();
    const double h = 1.0 / static_cast<double>(n - 1);
    const std::size_t faces = state.spatial.front().size();
    state.temporal.assign(static_cast<std::size_t>(n), JacobianField(faces));
    if (tape) {
        tape->steps.assign(static_cast<std::size_t>(n - 1), StepTape{});
        tape->step = h;
    }
    for (int t = 0; t + 1 < n; ++t) {
        StepTape* st = tape ? &tape->steps[static_cast<std::size_t>(t)] : nullptr;
        if (st) {
            st->spatial_range = spatial_window(t, state.window);
            st->temporal_range = temporal_window(t, state.window);
        }
        const nn::Matrix cp = encode_spatial_window(state, t, params, st ? &st->enc_p : nullptr);
        const nn::Matrix cr = encode_temporal_window(state, t, params, st ? &st->enc_r : nullptr);
        const JacobianField rate =
            ode_rhs(state.spatial.front(), cp, cr, static_cast<double>(t) * h, params, st ? &st->rate : nullptr);
        euler_step(state, t, h, rate);
    }
}

std::vector<JacobianField> TemporalModel::backward(const TemporalState& state, const nn::ParamStore& params,
                                                   const IntegrationTape& tape,
                                                   const std::vector<JacobianField>& grad_temporal,
                                                   nn::GradStore& grads) const
{
    const int n = state.frame_count();
    require(static_cast<int>(grad_temporal.size()) == n, ErrorCode::ShapeMismatch,
            "temporal gradient frame count mismatch");
    require(static_cast<int>(tape.steps.size()) == n - 1, ErrorCode::InvalidArgument,
            "integration tape does not match the state");
    const std::size_t faces = state.spatial.front().size();
    const double inv_faces = 1.0 / static_cast<double>(faces);
    const int enc = m_config.encoding_dim;

    std::vector<JacobianField> g_r = grad_temporal;
    std::vector<JacobianField> g_p(static_cast<std::size_t>(n), JacobianField(faces));

    auto spread = [inv_faces](std::vector<JacobianField>& dst, WindowRange r, const nn::Matrix& dtok) {
        for (int k = r.first; k <= r.last; ++k) {
            Mat2 d;
            d << dtok(k - r.first, 0), dtok(k - r.first, 1), dtok(k - r.first, 2), dtok(k - r.first, 3);
            for (auto& m : dst[static_cast<std::size_t>(k)].per_face) m += inv_faces * d;
        }
    };

    for (int t = n - 2; t >= 0; --t) {
        const StepTape& st = tape.steps[static_cast<std::size_t>(t)];
        const JacobianField& g_next = g_r[static_cast<std::size_t>(t + 1)];
        g_r[static_cast<std::size_t>(t)] += g_next;

        nn::Matrix g_rate(static_cast<Eigen::Index>(faces), 4);
        for (std::size_t f = 0; f < faces; ++f) {
            const Mat2& g = g_next[f];
            g_rate.row(static_cast<Eigen::Index>(f)) << g(0, 0), g(0, 1), g(1, 0), g(1, 1);
        }
        g_rate *= tape.step;

        const nn::Matrix g_in = m_rate.backward(params, st.rate, g_rate, grads);
        for (std::size_t f = 0; f < faces; ++f) {
            const auto r = static_cast<Eigen::Index>(f);
            Mat2 d;
            d << g_in(r, 0), g_in(r, 1), g_in(r, 2), g_in(r, 3);
            g_p[0][f] += d;
        }
        const nn::Matrix g_cp = g_in.middleCols(4, enc).colwise().sum();
        const nn::Matrix g_cr = g_in.middleCols(4 + enc, enc).colwise().sum();

        spread(g_p, st.spatial_range, m_enc_p.backward(params, st.enc_p, g_cp, grads));
        // J^R_0 is fixed at zero; gradients reaching it are dropped.
        const nn::Matrix dtok_r = m_enc_r.backward(params, st.enc_r, g_cr, grads);
        if (t > 0) spread(g_r, st.temporal_range, dtok_r);
    }
    return g_p;
}

void integrate_with(TemporalState& state, const RateFunction& rate)
{
    check_state(state);
    const int n = state.frame_count();
    const double h = 1.0 / static_cast<double>(n - 1);
    state.temporal.assign(static_cast<std::size_t>(n), JacobianField(state.spatial.front().size()));
    for (int t = 0; t + 1 < n; ++t) euler_step(state, t, h, rate(state, t, static_cast<double>(t) * h));
}

JacobianField total_jacobian(const TemporalState& state, int t)
{
    require(t >= 0 && t < state.frame_count(), ErrorCode::IndexOutOfRange, "frame index out of range");
    return state.spatial[static_cast<std::size_t>(t)] + state.temporal[static_cast<std::size_t>(t)];
}

} // namespace flexmesh::temporal
