#pragma once

#include "guidance/oracle.hpp"
#include "guidance/pfode.hpp"
#include "pipeline/animator.hpp"
#include "pipeline/config.hpp"

#include <iosfwd>
#include <memory>

namespace flexmesh::pipeline {

struct FitRestSummary
{
    double objective = 0;
    double mean_deviation = 0;
    int iterations = 0;
    std::filesystem::path checkpoint;
};

/// Fits the rest Jacobians and writes them to the rest checkpoint as
/// "rest.jacobians" (F x 4, row-major 2x2 per face).
FitRestSummary cmd_fit_rest(const RunConfig& config, std::ostream& log);

mesh::JacobianField load_rest_jacobians(const std::filesystem::path& path, int face_count);

struct AnimateSummary
{
    std::vector<StepLog> losses;
    trajectory::TrajectorySet trajectory;
    std::filesystem::path gif;
};

/// Writes under out_dir: frames/frame_NNNN.png, animation.gif,
/// trajectory.json, motion.json, losses.csv, metrics.csv, params.ckpt.
AnimateSummary cmd_animate(const RunConfig& config, std::ostream& log);

/// Builds the oracle named by config.oracle for the given scene.
std::unique_ptr<guidance::ScoreOracle> make_oracle(const RunConfig& config, const Scene& scene);

/// Accepts a motion record ({"frames": ...}) or a trajectory file; the
/// latter is reduced with config.metrics_source. Returns the CSV report.
std::string cmd_metrics(const std::filesystem::path& record, const RunConfig& config);

guidance::FokkerPlanckReport cmd_pfode_demo(const RunConfig& config, std::ostream& log);

std::string losses_csv(const std::vector<StepLog>& losses);

} // namespace flexmesh::pipeline
