#include "pipeline/commands.hpp"

#include "common/error.hpp"
#include "common/json_util.hpp"
#include "deform/rest_fit.hpp"
#include "guidance/remote_oracle.hpp"
#include "mesh/mesh_io.hpp"
#include "metrics/metrics.hpp"
#include "nn/checkpoint.hpp"
#include "render/image_io.hpp"
#include "trajectory/trajectory_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace flexmesh::pipeline {

namespace {

constexpr const char* kRestArray = "rest.jacobians";

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot write '" + path.string() + "'");
    out << text;
    if (!out) fail(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

void ensure_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorCode::Io, "cannot create '" + dir.string() + "': " + ec.message());
}

std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
        } catch (const std::exception&) {
            fail(ErrorCode::Parse, "cannot parse number '" + item + "' in list '" + text + "'");
        }
    }
    require(!out.empty(), ErrorCode::Parse, "empty list");
    return out;
}

guidance::FrameStack load_teacher_frames(const std::filesystem::path& dir, int width, int height)
{
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.path().extension() == ".png") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    require(!files.empty(), ErrorCode::Io, "no PNG frames in '" + dir.string() + "'");
    const Eigen::Index per = static_cast<Eigen::Index>(width) * height * render::RasterImage::kChannels;
    Eigen::VectorXd data(per * static_cast<Eigen::Index>(files.size()));
    for (std::size_t t = 0; t < files.size(); ++t) {
        const auto img = render::load_png(files[t]);
        require(img.width() == width && img.height() == height, ErrorCode::ShapeMismatch,
                files[t].string() + " is " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                    ", expected the render size " + std::to_string(width) + "x" + std::to_string(height));
        data.segment(static_cast<Eigen::Index>(t) * per, per) = Eigen::Map<const Eigen::VectorXd>(img.data().data(), per);
    }
    return guidance::FrameStack({static_cast<int>(files.size()), height, width, render::RasterImage::kChannels},
                                std::move(data));
}

} // namespace

mesh::JacobianField load_rest_jacobians(const std::filesystem::path& path, int face_count)
{
    if (!std::filesystem::exists(path))
        fail(ErrorCode::Io, "rest checkpoint '" + path.string() + "' not found (run fit-rest first)");
    const auto arrays = nn::load_checkpoint(path);
    const nn::Matrix& m = nn::find_array(arrays, kRestArray);
    require(m.rows() == face_count && m.cols() == 4, ErrorCode::ShapeMismatch,
            path.string() + ": rest Jacobians are " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                ", mesh needs " + std::to_string(face_count) + "x4");
    Eigen::VectorXd flat(m.size());
    for (Eigen::Index f = 0; f < m.rows(); ++f)
        for (Eigen::Index k = 0; k < 4; ++k) flat[f * 4 + k] = m(f, k);
    return mesh::JacobianField::unflatten(flat);
}

FitRestSummary cmd_fit_rest(const RunConfig& config, std::ostream& log)
{
    config.validate();
    const auto mesh = mesh::load_mesh(config.mesh);
    auto ops = std::make_shared<const mesh::DifferentialOperators>(mesh);
    const auto sys = deform::assemble(ops, config.constraint_weight);

    deform::RestFitOptions opt;
    opt.iterations = config.rest_iterations;
    opt.step_size = config.rest_step;
    opt.init_noise = config.rest_noise;
    opt.seed = Rng(config.seed).split("rest").seed();
    const auto fit = deform::fit_rest_jacobians(sys, opt);

    const Eigen::VectorXd flat = fit.jacobians.flatten();
    nn::Matrix m(mesh.face_count(), 4);
    for (Eigen::Index f = 0; f < m.rows(); ++f)
        for (Eigen::Index k = 0; k < 4; ++k) m(f, k) = flat[f * 4 + k];

    FitRestSummary out;
    out.checkpoint = config.resolved_rest_checkpoint();
    if (out.checkpoint.has_parent_path()) ensure_dir(out.checkpoint.parent_path());
    nn::save_checkpoint(out.checkpoint, {{kRestArray, m}});
    out.objective = fit.history.empty() ? deform::rest_objective(fit.jacobians) : fit.history.back();
    out.mean_deviation = deform::mean_identity_deviation(fit.jacobians);
    out.iterations = fit.iterations_run;
    log << "fit-rest: iterations " << out.iterations << ", objective " << fmt(out.objective)
        << ", mean deviation " << fmt(out.mean_deviation) << "\n"
        << "wrote " << out.checkpoint.string() << "\n";
    return out;
}

std::unique_ptr<guidance::ScoreOracle> make_oracle(const RunConfig& config, const Scene& scene)
{
    const int size = config.render_size;
    if (config.oracle == "gaussian") {
        const auto rest = std::vector<Positions>(static_cast<std::size_t>(config.frames), scene.mesh().vertices());
        const auto mean = render_stack(scene, rest, size, size);
        return std::make_unique<guidance::GaussianAnalytic>(
            guidance::GaussianAnalytic::diagonal(mean.data, Eigen::VectorXd::Ones(mean.data.size())));
    }
    if (config.oracle.rfind("teacher:", 0) == 0) {
        const std::filesystem::path src = config.oracle.substr(8);
        if (std::filesystem::is_directory(src)) {
            auto frames = load_teacher_frames(src, size, size);
            require(frames.frames() == config.frames, ErrorCode::ShapeMismatch,
                    "teacher has " + std::to_string(frames.frames()) + " frames, run uses " +
                        std::to_string(config.frames));
            return std::make_unique<guidance::TeacherOracle>(std::move(frames));
        }
        auto traj = trajectory::load_trajectory(src);
        traj.frame_count = config.frames;
        traj.validate(scene.mesh().keypoint_positions());
        return std::make_unique<guidance::TeacherOracle>(render_stack(scene, pose_trajectory(scene, traj), size, size));
    }
    if (config.oracle.rfind("remote:", 0) == 0)
        return std::make_unique<guidance::RemoteDenoiser>(config.oracle.substr(7),
                                                          guidance::RemoteOptions{config.oracle_timeout,
                                                                                  config.oracle_retries});
    fail(ErrorCode::InvalidArgument, "unknown oracle '" + config.oracle + "'");
}

std::string losses_csv(const std::vector<StepLog>& losses)
{
    std::string out = "step,l_sds,l_flow,total\n";
    for (const auto& l : losses)
        out += std::to_string(l.step) + "," + fmt(l.sds) + "," + fmt(l.flow) + "," + fmt(l.total) + "\n";
    return out;
}

AnimateSummary cmd_animate(const RunConfig& config, std::ostream& log)
{
    config.validate();
    auto mesh = mesh::load_mesh(config.mesh);
    auto image = render::load_png(config.image);
    auto rest = load_rest_jacobians(config.resolved_rest_checkpoint(), mesh.face_count());
    Scene scene = Scene::build(std::move(mesh), std::move(image), std::move(rest), config.constraint_weight);
    const auto oracle = make_oracle(config, scene);

    AnimatorOptions opt;
    opt.frames = config.frames;
    opt.render_width = config.render_size;
    opt.render_height = config.render_size;
    opt.adam.lr = config.lr * config.param_unit;
    opt.guidance.guidance_scale = config.guidance_scale;
    opt.guidance.lambda = config.lambda;
    opt.guidance.samples = config.samples;
    if (!config.prompt.empty()) opt.guidance.condition = config.prompt;
    opt.temporal.window = config.window;
    opt.seed = config.seed;
    Animator animator(std::move(scene), opt);

    AnimateSummary out;
    for (int s = 0; s < config.steps; ++s) {
        out.losses.push_back(animator.step(*oracle));
        const auto& l = out.losses.back();
        if (s % 50 == 0 || s + 1 == config.steps)
            log << "step " << s << ": sds " << fmt(l.sds) << " flow " << fmt(l.flow) << " total " << fmt(l.total)
                << "\n";
    }

    ensure_dir(config.out_dir);
    const auto fp = animator.forward();
    const auto& sc = animator.scene();
    const auto frames = render_frames(sc, fp.total_vertices, sc.image.width(), sc.image.height());
    render::emit_frames(frames, config.out_dir / "frames");
    out.gif = config.out_dir / "animation.gif";
    render::emit_gif(frames, out.gif, config.fps);

    out.trajectory = fp.trajectory;
    trajectory::save_trajectory(fp.trajectory, config.out_dir / "trajectory.json");
    const auto record = metrics::record_from_trajectories(
        fp.trajectory, config.metrics_source == "control-points" ? metrics::MotionSource::ControlPoints
                                                                 : metrics::MotionSource::Keypoints);
    metrics::save_record(record, config.out_dir / "motion.json");
    write_text(config.out_dir / "metrics.csv", metrics::report_csv(metrics::evaluate(record)));
    write_text(config.out_dir / "losses.csv", losses_csv(out.losses));
    nn::save_checkpoint(config.out_dir / "params.ckpt", animator.params().values());
    log << "wrote " << config.out_dir.string() << "\n";
    return out;
}

std::string cmd_metrics(const std::filesystem::path& record_path, const RunConfig& config)
{
    config.validate();
    const auto doc = json_util::read_file(record_path);
    metrics::MotionRecord record;
    if (doc.is_object() && doc.contains("control_points")) {
        trajectory::TrajectorySet traj;
        try {
            traj = trajectory::trajectory_from_json(doc);
        } catch (const Error& e) {
            fail(e.code(), record_path.string() + ": " + e.what());
        }
        record = metrics::record_from_trajectories(traj, config.metrics_source == "control-points"
                                                             ? metrics::MotionSource::ControlPoints
                                                             : metrics::MotionSource::Keypoints);
    } else {
        record = metrics::load_record(record_path);
    }
    return metrics::report_csv(metrics::evaluate(record));
}

guidance::FokkerPlanckReport cmd_pfode_demo(const RunConfig& config, std::ostream& log)
{
    config.validate();
    const auto rates = parse_list(config.pfode_rates);
    const auto schedule = guidance::NoiseSchedule::linear(Eigen::Map<const Eigen::VectorXd>(
        rates.data(), static_cast<Eigen::Index>(rates.size())));
    guidance::FokkerPlanckOptions opt;
    opt.particles = config.pfode_particles;
    opt.steps = config.pfode_steps;
    opt.seed = config.seed;
    opt.fault_scale = config.pfode_fault;
    opt.locality_queries = std::min(1000, config.pfode_particles / 2);
    const auto rep = guidance::verify_fokker_planck(schedule, opt);
    log << (rep.passed ? "PASS" : "FAIL") << " max relative covariance error " << fmt(rep.max_error) << " (sde "
        << fmt(rep.sde_error) << ", pfode " << fmt(rep.ode_error) << ")\n"
        << "neighbourhood overlap k=10: pfode " << fmt(rep.ode_locality) << ", sde " << fmt(rep.sde_locality) << "\n";
    return rep;
}

} // namespace flexmesh::pipeline
