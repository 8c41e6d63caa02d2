#include "guidance/remote_oracle.hpp"

#include "common/error.hpp"

#include <httplib.h>
#include <json.hpp>

#include <bit>
#include <cstring>

namespace flexmesh::guidance {

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::vector<unsigned char>& in)
{
    std::string out;
    out.reserve((in.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < in.size(); i += 3) {
        const unsigned v = (in[i] << 16) | (in[i + 1] << 8) | in[i + 2];
        out += kAlphabet[(v >> 18) & 63];
        out += kAlphabet[(v >> 12) & 63];
        out += kAlphabet[(v >> 6) & 63];
        out += kAlphabet[v & 63];
    }
    if (i + 1 == in.size()) {
        const unsigned v = in[i] << 16;
        out += kAlphabet[(v >> 18) & 63];
        out += kAlphabet[(v >> 12) & 63];
        out += "==";
    } else if (i + 2 == in.size()) {
        const unsigned v = (in[i] << 16) | (in[i + 1] << 8);
        out += kAlphabet[(v >> 18) & 63];
        out += kAlphabet[(v >> 12) & 63];
        out += kAlphabet[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

std::vector<unsigned char> base64_decode(const std::string& in)
{
    int lut[256];
    std::fill(std::begin(lut), std::end(lut), -1);
    for (int i = 0; i < 64; ++i) lut[static_cast<unsigned char>(kAlphabet[i])] = i;

    std::vector<unsigned char> out;
    unsigned acc = 0;
    int bits = 0;
    for (char ch : in) {
        if (ch == '=') break;
        if (ch == '\n' || ch == '\r') continue;
        const int v = lut[static_cast<unsigned char>(ch)];
        if (v < 0) fail(ErrorCode::Parse, "invalid base64 character");
        acc = (acc << 6) | static_cast<unsigned>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<unsigned char>((acc >> bits) & 0xff));
        }
    }
    return out;
}

} // namespace

std::string encode_float32_base64(const Eigen::VectorXd& values)
{
    std::vector<unsigned char> bytes(static_cast<std::size_t>(values.size()) * 4);
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(values[i]));
        for (int b = 0; b < 4; ++b)
            bytes[static_cast<std::size_t>(i) * 4 + static_cast<std::size_t>(b)] =
                static_cast<unsigned char>((bits >> (8 * b)) & 0xff);
    }
    return base64_encode(bytes);
}

Eigen::VectorXd decode_float32_base64(const std::string& text)
{
    const auto bytes = base64_decode(text);
    require(bytes.size() % 4 == 0, ErrorCode::Parse, "float32 payload length is not a multiple of 4");
    Eigen::VectorXd out(static_cast<Eigen::Index>(bytes.size() / 4));
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b)
            bits |= static_cast<std::uint32_t>(bytes[static_cast<std::size_t>(i) * 4 + static_cast<std::size_t>(b)])
                    << (8 * b);
        out[i] = std::bit_cast<float>(bits);
    }
    return out;
}

RemoteDenoiser::RemoteDenoiser(std::string url, RemoteOptions options, DiffusionSchedule schedule)
    : ScoreOracle(schedule)
    , m_url(std::move(url))
    , m_options(options)
{
    const auto scheme = m_url.find("://");
    require(scheme != std::string::npos && m_url.compare(0, scheme, "http") == 0, ErrorCode::InvalidArgument,
            "remote oracle URL must start with http://, got '" + m_url + "'");
    const auto slash = m_url.find('/', scheme + 3);
    m_origin = m_url.substr(0, slash);
    std::string prefix = slash == std::string::npos ? "" : m_url.substr(slash);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    m_path = prefix + "/v1/denoise";
    require(m_options.retries >= 0, ErrorCode::InvalidArgument, "retry count must be nonnegative");
    require(m_options.timeout_seconds > 0, ErrorCode::InvalidArgument, "timeout must be positive");
}

Eigen::VectorXd RemoteDenoiser::predict_eps(const FrameStack& z, double t_prime, const Condition& condition) const
{
    nlohmann::json body = {{"frames", encode_float32_base64(z.data)},
                           {"shape", z.shape},
                           {"noise_level", t_prime},
                           {"prompt", condition ? nlohmann::json(*condition) : nlohmann::json(nullptr)}};
    const std::string payload = body.dump();

    std::lock_guard<std::mutex> lock(m_mutex);
    httplib::Client client(m_origin);
    const auto timeout = std::chrono::duration<double>(m_options.timeout_seconds);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    const httplib::Headers headers = {{kProtocolHeader, kProtocolVersion}};

    std::string last_error;
    for (int attempt = 0; attempt <= m_options.retries; ++attempt) {
        auto res = client.Post(m_path, headers, payload, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) fail(ErrorCode::Oracle, m_url + m_path + " returned HTTP " + std::to_string(res->status));

        nlohmann::json reply;
        try {
            reply = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorCode::Oracle, "malformed reply from " + m_url + ": " + e.what());
        }
        if (!reply.contains("eps_hat") || !reply["eps_hat"].is_string() || !reply.contains("shape"))
            fail(ErrorCode::Oracle, "reply from " + m_url + " lacks eps_hat/shape");
        if (reply["shape"] != nlohmann::json(z.shape))
            fail(ErrorCode::Oracle, "reply shape " + reply["shape"].dump() + " differs from request");
        Eigen::VectorXd eps = decode_float32_base64(reply["eps_hat"].get<std::string>());
        require(eps.size() == z.data.size(), ErrorCode::Oracle, "eps_hat length differs from request");
        return eps;
    }
    fail(ErrorCode::Oracle, "remote oracle " + m_url + " unreachable after " + std::to_string(m_options.retries + 1) +
                                " attempts: " + last_error);
}

} // namespace flexmesh::guidance
