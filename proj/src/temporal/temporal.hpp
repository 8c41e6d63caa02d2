#pragma once

#include "mesh/operators.hpp"
#include "nn/attention.hpp"
#include "nn/mlp.hpp"

#include <functional>
#include <vector>

namespace flexmesh::temporal {

using mesh::JacobianField;

/// Spatial (posing) and temporal (correction) Jacobians for every frame.
struct TemporalState
{
    std::vector<JacobianField> spatial;
    std::vector<JacobianField> temporal;
    int window = 6;

    int frame_count() const { return static_cast<int>(spatial.size()); }

    /// Spatial Jacobians with temporal corrections all zero.
    static TemporalState from_spatial(std::vector<JacobianField> spatial, int window);
};

struct TemporalConfig
{
    int window = 6;
    int encoding_dim = 8;
    int heads = 2;
    int dim_kv = 32;
    int hidden = 32;
    int time_frequencies = 2;
};

/// Frames [first, last] that feed an encoder at step t.
struct WindowRange
{
    int first;
    int last;
};

/// Spatial window: frames max(0, t-W+1) .. t.
WindowRange spatial_window(int t, int window);
/// Temporal window: frames max(0, t-W) .. t-1, or just frame 0 at t = 0.
WindowRange temporal_window(int t, int window);

/// One token per frame: the face-mean of the field, row-major 2x2.
nn::Matrix frame_token(const JacobianField& field);

/// sin/cos features of u at frequencies pi, 2pi, ...
Eigen::RowVectorXd time_features(double u, int frequencies);

struct StepTape
{
    WindowRange spatial_range{0, 0};
    WindowRange temporal_range{0, 0};
    nn::AttentionTape enc_p;
    nn::AttentionTape enc_r;
    nn::MlpTape rate;
};

struct IntegrationTape
{
    std::vector<StepTape> steps;
    double step = 0;
};

/// f_R and the two window encoders. Parameters live under "temporal.enc_p",
/// "temporal.enc_r" and "temporal.f_r"; f_R is applied per face to
/// [J0^P_f (4), C_W^P, C_{W-1}^R, time features] and its last layer starts
/// at zero.
class TemporalModel
{
public:
    explicit TemporalModel(TemporalConfig config = {});

    const TemporalConfig& config() const { return m_config; }
    const nn::Attention& spatial_encoder() const { return m_enc_p; }
    const nn::Attention& temporal_encoder() const { return m_enc_r; }
    const nn::Mlp& rate_mlp() const { return m_rate; }

    void init(nn::ParamStore& params, Rng& rng) const;

    nn::Matrix encode_spatial_window(const TemporalState& state, int t, const nn::ParamStore& params,
                                     nn::AttentionTape* tape = nullptr) const;
    nn::Matrix encode_temporal_window(const TemporalState& state, int t, const nn::ParamStore& params,
                                      nn::AttentionTape* tape = nullptr) const;

    /// Per-face rates dJ^R/dt at normalized time u.
    JacobianField ode_rhs(const JacobianField& base, const nn::Matrix& enc_p, const nn::Matrix& enc_r, double u,
                          const nn::ParamStore& params, nn::MlpTape* tape = nullptr) const;

    /// Euler integration with h = 1/(N-1); encodings are recomputed every
    /// step from already-integrated frames only.
    void integrate(TemporalState& state, const nn::ParamStore& params, IntegrationTape* tape = nullptr) const;

    /// Reverse pass of integrate(). Takes dLoss/dJ^R_t for every frame,
    /// accumulates parameter gradients and returns dLoss/dJ^P_t.
    std::vector<JacobianField> backward(const TemporalState& state, const nn::ParamStore& params,
                                        const IntegrationTape& tape, const std::vector<JacobianField>& grad_temporal,
                                        nn::GradStore& grads) const;

private:
    TemporalConfig m_config;
    nn::Attention m_enc_p;
    nn::Attention m_enc_r;
    nn::Mlp m_rate;
};

/// Rate callback for integrate_with(): (state, step index t, u_t) -> rates.
using RateFunction = std::function<JacobianField(const TemporalState&, int, double)>;

/// J^R_0 = 0, J^R_{t+1} = J^R_t + h rate(t), h = 1/(N-1).
void integrate_with(TemporalState& state, const RateFunction& rate);

/// J_t = J^P_t + J^R_t.
JacobianField total_jacobian(const TemporalState& state, int t);

} // namespace flexmesh::temporal
