#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace flexmesh::pipeline {

struct RunConfig
{
    std::filesystem::path mesh;
    std::filesystem::path image;
    std::string prompt;
    int frames = 24;
    int steps = 700;
    double lr = 0.5;
    double guidance_scale = 50.0;
    double lambda = 15.0;
    double constraint_weight = 1000.0;
    int window = 6;
    /// gaussian | teacher:<trajectory.json or frame dir> | remote:<url>
    std::string oracle = "gaussian";
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = "out";

    /// Rest Jacobian checkpoint; defaults to <out_dir>/rest.ckpt.
    std::filesystem::path rest_checkpoint;
    int rest_iterations = 10000;
    double rest_step = 0.01;
    double rest_noise = 0.0;

    /// Oracle resolution (square) used during optimization.
    int render_size = 64;
    double fps = 8.0;
    /// Adam step sizes are lr * param_unit in parameter space.
    double param_unit = 1.0 / 256.0;
    int samples = 1;
    double oracle_timeout = 30.0;
    int oracle_retries = 3;
    /// keypoints | control-points
    std::string metrics_source = "keypoints";

    /// pfode-demo: per-dimension C(t) rates, e.g. "1,1" or "1,2".
    std::string pfode_rates = "1,1";
    int pfode_particles = 50000;
    int pfode_steps = 200;
    double pfode_fault = 1.0;

    /// Throws InvalidArgument naming the first out-of-range field.
    void validate() const;

    std::filesystem::path resolved_rest_checkpoint() const;
};

/// Applies one key/value pair. Keys may use '-' or '_'. Throws on unknown
/// keys and unparsable values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Reads "key = value" lines; '#' starts a comment.
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

/// FLEXMESH_SEED, if set and well-formed.
std::optional<std::uint64_t> seed_from_env();

/// Every setting as key -> value text, for logging.
std::map<std::string, std::string> describe(const RunConfig& config);

} // namespace flexmesh::pipeline
