#pragma once

#include "guidance/oracle.hpp"

#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace flexmesh::guidance {

struct RemoteOptions
{
    double timeout_seconds = 30.0;
    int retries = 3;
};

/// Client for an external denoiser speaking the /v1/denoise JSON protocol.
/// Tensors travel as base64 of little-endian float32. Calls are serialized.
class RemoteDenoiser final : public ScoreOracle
{
public:
    /// url: "http://host:port" with an optional path prefix.
    RemoteDenoiser(std::string url, RemoteOptions options = {}, DiffusionSchedule schedule = {});

    Eigen::VectorXd predict_eps(const FrameStack& z, double t_prime, const Condition& condition) const override;
    std::string name() const override { return "remote(" + m_url + ")"; }

private:
    std::string m_url;
    std::string m_origin;
    std::string m_path;
    RemoteOptions m_options;
    mutable std::mutex m_mutex;
};

inline constexpr const char* kProtocolHeader = "x-flexmesh-proto";
inline constexpr const char* kProtocolVersion = "1";

std::string encode_float32_base64(const Eigen::VectorXd& values);
Eigen::VectorXd decode_float32_base64(const std::string& text);

} // namespace flexmesh::guidance
