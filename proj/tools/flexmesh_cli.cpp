#include "flexmesh/flexmesh.h"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

namespace {

const std::vector<std::pair<std::string, std::string>> kSettings = {
    {"mesh", "mesh JSON"},
    {"image", "input PNG"},
    {"prompt", "condition string passed to the oracle"},
    {"frames", "frame count (24)"},
    {"steps", "optimizer steps (700)"},
    {"lr", "Adam learning rate (0.5)"},
    {"guidance-scale", "classifier-free guidance scale (50)"},
    {"lambda", "flow loss weight (15)"},
    {"constraint-weight", "keypoint constraint weight (1000)"},
    {"window", "temporal window (6)"},
    {"oracle", "gaussian | teacher:<path> | remote:<url>"},
    {"seed", "random seed (FLEXMESH_SEED fallback)"},
    {"out-dir", "output directory (out)"},
    {"rest-checkpoint", "rest Jacobian checkpoint (<out-dir>/rest.ckpt)"},
    {"rest-iterations", "rest fit iterations (10000)"},
    {"rest-step", "rest fit step size (0.01)"},
    {"rest-noise", "rest fit initial perturbation (0)"},
    {"render-size", "oracle resolution in pixels (64)"},
    {"fps", "GIF frame rate (8)"},
    {"param-unit", "parameter units per learning-rate unit (1/256)"},
    {"samples", "Monte-Carlo samples per step (1)"},
    {"oracle-timeout", "remote oracle timeout in seconds (30)"},
    {"oracle-retries", "remote oracle retries (3)"},
    {"metrics-source", "keypoints | control-points"},
    {"pfode-rates", "per-dimension C(t) rates, comma separated (1,1)"},
    {"pfode-particles", "pfODE particle count (50000)"},
    {"pfode-steps", "pfODE Euler steps (200)"},
    {"pfode-fault", "scale applied to Cdot in both integrators (1 = no fault)"},
};

int report(fm_status s)
{
    if (s != FM_OK) std::fprintf(stderr, "error (%s): %s\n", fm_status_name(s), fm_last_error());
    return fm_status_exit_code(s);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Mesh deformation animation toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", fm_version());

    std::string config_file;
    app.add_option("--config", config_file, "key = value settings file");
    std::map<std::string, std::string> values;
    for (const auto& [key, help] : kSettings) app.add_option("--" + key, values[key], help);

    auto* fit = app.add_subcommand("fit-rest", "fit rest Jacobians and write the rest checkpoint");
    auto* animate = app.add_subcommand("animate", "optimize trajectories and render the animation");
    auto* metrics = app.add_subcommand("metrics", "DS/AE report for a motion record or trajectory");
    std::string record;
    metrics->add_option("record", record, "motion record or trajectory JSON")->required();
    auto* pfode = app.add_subcommand("pfode-demo", "check the pfODE and SDE covariances against theory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    fm_config* cfg = nullptr;
    if (fm_config_create(&cfg) != FM_OK) return report(FM_ERR_INTERNAL);
    struct Guard
    {
        fm_config* c;
        ~Guard() { fm_config_destroy(c); }
    } guard{cfg};

    if (const char* env = std::getenv("FLEXMESH_SEED"); env && *env)
        if (fm_status s = fm_config_set(cfg, "seed", env); s != FM_OK) return report(s);
    if (!config_file.empty())
        if (fm_status s = fm_config_load_file(cfg, config_file.c_str()); s != FM_OK) return report(s);
    for (const auto& [key, help] : kSettings)
        if (app.count("--" + key) > 0)
            if (fm_status s = fm_config_set(cfg, key.c_str(), values[key].c_str()); s != FM_OK) return report(s);

    if (*fit) {
        double objective = 0;
        return report(fm_run_fit_rest(cfg, &objective));
    }
    if (*animate) return report(fm_run_animate(cfg));
    if (*metrics) {
        char* csv = nullptr;
        const fm_status s = fm_run_metrics(cfg, record.c_str(), &csv);
        if (s == FM_OK) {
            std::fputs(csv, stdout);
            fm_string_free(csv);
        }
        return report(s);
    }
    if (*pfode) {
        int passed = 0;
        double err = 0;
        const fm_status s = fm_run_pfode_demo(cfg, &passed, &err);
        if (s != FM_OK) return report(s);
        return passed ? 0 : 1;
    }
    return 2;
}
