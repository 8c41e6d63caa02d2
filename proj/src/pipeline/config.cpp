#include "pipeline/config.hpp"

#include "common/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace flexmesh::pipeline {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string normalize_key(std::string key)
{
    std::replace(key.begin(), key.end(), '-', '_');
    return key;
}

double parse_double(const std::string& key, const std::string& v)
{
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used == v.size() && std::isfinite(d)) return d;
    } catch (const std::exception&) {
    }
    fail(ErrorCode::Parse, "setting '" + key + "': expected a number, got '" + v + "'");
}

long long parse_int(const std::string& key, const std::string& v)
{
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        fail(ErrorCode::Parse, "setting '" + key + "': expected an integer, got '" + v + "'");
    return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v)
{
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        fail(ErrorCode::Parse, "setting '" + key + "': expected a nonnegative integer, got '" + v + "'");
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> table = {
        {"mesh", [](RunConfig& c, auto&, auto& v) { c.mesh = v; }},
        {"image", [](RunConfig& c, auto&, auto& v) { c.image = v; }},
        {"prompt", [](RunConfig& c, auto&, auto& v) { c.prompt = v; }},
        {"frames", [](RunConfig& c, auto& k, auto& v) { c.frames = static_cast<int>(parse_int(k, v)); }},
        {"steps", [](RunConfig& c, auto& k, auto& v) { c.steps = static_cast<int>(parse_int(k, v)); }},
        {"lr", [](RunConfig& c, auto& k, auto& v) { c.lr = parse_double(k, v); }},
        {"guidance_scale", [](RunConfig& c, auto& k, auto& v) { c.guidance_scale = parse_double(k, v); }},
        {"lambda", [](RunConfig& c, auto& k, auto& v) { c.lambda = parse_double(k, v); }},
        {"constraint_weight", [](RunConfig& c, auto& k, auto& v) { c.constraint_weight = parse_double(k, v); }},
        {"window", [](RunConfig& c, auto& k, auto& v) { c.window = static_cast<int>(parse_int(k, v)); }},
        {"oracle", [](RunConfig& c, auto&, auto& v) { c.oracle = v; }},
        {"seed", [](RunConfig& c, auto& k, auto& v) { c.seed = parse_u64(k, v); }},
        {"out_dir", [](RunConfig& c, auto&, auto& v) { c.out_dir = v; }},
        {"rest_checkpoint", [](RunConfig& c, auto&, auto& v) { c.rest_checkpoint = v; }},
        {"rest_iterations", [](RunConfig& c, auto& k, auto& v) { c.rest_iterations = static_cast<int>(parse_int(k, v)); }},
        {"rest_step", [](RunConfig& c, auto& k, auto& v) { c.rest_step = parse_double(k, v); }},
        {"rest_noise", [](RunConfig& c, auto& k, auto& v) { c.rest_noise = parse_double(k, v); }},
        {"render_size", [](RunConfig& c, auto& k, auto& v) { c.render_size = static_cast<int>(parse_int(k, v)); }},
        {"fps", [](RunConfig& c, auto& k, auto& v) { c.fps = parse_double(k, v); }},
        {"param_unit", [](RunConfig& c, auto& k, auto& v) { c.param_unit = parse_double(k, v); }},
        {"samples", [](RunConfig& c, auto& k, auto& v) { c.samples = static_cast<int>(parse_int(k, v)); }},
        {"oracle_timeout", [](RunConfig& c, auto& k, auto& v) { c.oracle_timeout = parse_double(k, v); }},
        {"oracle_retries", [](RunConfig& c, auto& k, auto& v) { c.oracle_retries = static_cast<int>(parse_int(k, v)); }},
        {"metrics_source", [](RunConfig& c, auto&, auto& v) { c.metrics_source = v; }},
        {"pfode_rates", [](RunConfig& c, auto&, auto& v) { c.pfode_rates = v; }},
        {"pfode_particles", [](RunConfig& c, auto& k, auto& v) { c.pfode_particles = static_cast<int>(parse_int(k, v)); }},
        {"pfode_steps", [](RunConfig& c, auto& k, auto& v) { c.pfode_steps = static_cast<int>(parse_int(k, v)); }},
        {"pfode_fault", [](RunConfig& c, auto& k, auto& v) { c.pfode_fault = parse_double(k, v); }},
    };
    return table;
}

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

void apply_setting(RunConfig& config, const std::string& key, const std::string& value)
{
    const std::string k = normalize_key(trim(key));
    const auto it = setters().find(k);
    if (it == setters().end()) fail(ErrorCode::Parse, "unknown setting '" + key + "'");
    it->second(config, k, trim(value));
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot open config '" + path.string() + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::Parse, path.string() + ":" + std::to_string(lineno) + ": expected key = value");
        try {
            apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
        } catch (const Error& e) {
            fail(e.code(), path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

std::optional<std::uint64_t> seed_from_env()
{
    const char* v = std::getenv("FLEXMESH_SEED");
    if (!v || !*v) return std::nullopt;
    return parse_u64("FLEXMESH_SEED", v);
}

void RunConfig::validate() const
{
    auto check = [](bool ok, const std::string& msg) { require(ok, ErrorCode::InvalidArgument, msg); };
    check(frames >= 3, "frames must be >= 3");
    check(steps >= 0, "steps must be >= 0");
    check(lr > 0, "lr must be positive");
    check(guidance_scale >= 0, "guidance-scale must be >= 0");
    check(lambda >= 0, "lambda must be >= 0");
    check(constraint_weight > 0, "constraint-weight must be positive");
    check(window >= 1, "window must be >= 1");
    check(rest_iterations >= 0, "rest-iterations must be >= 0");
    check(rest_step > 0, "rest-step must be positive");
    check(rest_noise >= 0, "rest-noise must be >= 0");
    check(render_size >= 4 && render_size <= 4096, "render-size must lie in [4, 4096]");
    check(fps > 0, "fps must be positive");
    check(param_unit > 0, "param-unit must be positive");
    check(samples >= 1, "samples must be >= 1");
    check(oracle_timeout > 0, "oracle-timeout must be positive");
    check(oracle_retries >= 0, "oracle-retries must be >= 0");
    check(metrics_source == "keypoints" || metrics_source == "control-points",
          "metrics-source must be keypoints or control-points");
    check(oracle == "gaussian" || oracle.rfind("teacher:", 0) == 0 || oracle.rfind("remote:", 0) == 0,
          "oracle must be gaussian, teacher:<path> or remote:<url>");
    check(pfode_particles >= 2, "pfode-particles must be >= 2");
    check(pfode_steps >= 1, "pfode-steps must be >= 1");
    check(pfode_fault >= 0, "pfode-fault must be >= 0");
}

std::filesystem::path RunConfig::resolved_rest_checkpoint() const
{
    return rest_checkpoint.empty() ? out_dir / "rest.ckpt" : rest_checkpoint;
}

std::map<std::string, std::string> describe(const RunConfig& c)
{
    return {{"mesh", c.mesh.string()},
            {"image", c.image.string()},
            {"prompt", c.prompt},
            {"frames", std::to_string(c.frames)},
            {"steps", std::to_string(c.steps)},
            {"lr", fmt(c.lr)},
            {"guidance_scale", fmt(c.guidance_scale)},
            {"lambda", fmt(c.lambda)},
            {"constraint_weight", fmt(c.constraint_weight)},
            {"window", std::to_string(c.window)},
            {"oracle", c.oracle},
            {"seed", std::to_string(c.seed)},
            {"out_dir", c.out_dir.string()},
            {"rest_checkpoint", c.resolved_rest_checkpoint().string()},
            {"render_size", std::to_string(c.render_size)},
            {"fps", fmt(c.fps)},
            {"param_unit", fmt(c.param_unit)},
            {"samples", std::to_string(c.samples)}};
}

} // namespace flexmesh::pipeline
