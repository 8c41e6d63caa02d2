#include "metrics/metrics.hpp"

#include "common/error.hpp"
#include "common/json_util.hpp"

#include <cstdio>
#include <string>

namespace flexmesh::metrics {

void MotionRecord::validate() const
{
    require(!frames.empty(), ErrorCode::InvalidArgument, "motion record has no frames");
    const auto m = frames.front().rows();
    require(m > 0, ErrorCode::InvalidArgument, "motion record has no keypoints");
    for (std::size_t t = 0; t < frames.size(); ++t) {
        require(frames[t].rows() == m, ErrorCode::ShapeMismatch,
                "ragged motion record: frame " + std::to_string(t) + " has " + std::to_string(frames[t].rows()) +
                    " keypoints, expected " + std::to_string(m));
        require(all_finite(frames[t]), ErrorCode::NonFinite,
                "motion record frame " + std::to_string(t) + " is not finite");
    }
}

MotionRecord record_from_trajectories(const trajectory::TrajectorySet& traj, MotionSource source)
{
    MotionRecord rec;
    if (source == MotionSource::Keypoints) {
        for (int t = 0; t < traj.frame_count; ++t) rec.frames.push_back(trajectory::sample(traj, t));
        return rec;
    }
    for (std::size_t j = 0; j < 4; ++j) {
        Positions p(traj.keypoint_count(), 2);
        for (int i = 0; i < traj.keypoint_count(); ++i)
            p.row(i) = traj.control_points[static_cast<std::size_t>(i)][j].transpose();
        rec.frames.push_back(std::move(p));
    }
    return rec;
}

namespace {

double ds_for(const MotionRecord& r, int i)
{
    double sum = 0;
    Vec2 prev = Vec2::Zero();
    for (int t = 1; t < r.frame_count(); ++t) {
        const Vec2 d = (r.frames[static_cast<std::size_t>(t)].row(i) - r.frames[static_cast<std::size_t>(t - 1)].row(i))
                           .transpose();
        sum += (d - prev).norm();
        prev = d;
    }
    return sum;
}

double ae_for(const MotionRecord& r, int i)
{
    double sum = 0;
    for (int t = 1; t < r.frame_count(); ++t)
        sum += (r.frames[static_cast<std::size_t>(t)].row(i) - r.frames.front().row(i)).squaredNorm();
    return sum;
}

void check(const MotionRecord& r, int min_frames, const char* metric)
{
    r.validate();
    require(r.frame_count() >= min_frames, ErrorCode::InvalidArgument,
            std::string(metric) + " needs at least " + std::to_string(min_frames) + " frames, got " +
                std::to_string(r.frame_count()));
}

} // namespace

double deformation_smoothness(const MotionRecord& record)
{
    check(record, 3, "DS");
    double sum = 0;
    for (int i = 0; i < record.keypoint_count(); ++i) sum += ds_for(record, i);
    return sum / (static_cast<double>(record.frame_count() - 1) * record.keypoint_count());
}

double animation_energy(const MotionRecord& record)
{
    check(record, 2, "AE");
    double sum = 0;
    for (int i = 0; i < record.keypoint_count(); ++i) sum += ae_for(record, i);
    return sum / (static_cast<double>(record.frame_count()) * record.keypoint_count());
}

MetricsReport evaluate(const MotionRecord& record)
{
    MetricsReport rep;
    rep.ds = deformation_smoothness(record);
    rep.ae = animation_energy(record);
    const double n = record.frame_count();
    for (int i = 0; i < record.keypoint_count(); ++i) {
        rep.ds_per_keypoint.push_back(ds_for(record, i) / (n - 1));
        rep.ae_per_keypoint.push_back(ae_for(record, i) / n);
    }
    return rep;
}

std::string report_csv(const MetricsReport& report)
{
    std::string out = "metric,keypoint,value\n";
    char buf[64];
    auto row = [&](const char* metric, const std::string& key, double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out += std::string(metric) + "," + key + "," + buf + "\n";
    };
    row("DS", "all", report.ds);
    row("AE", "all", report.ae);
    for (std::size_t i = 0; i < report.ds_per_keypoint.size(); ++i) row("DS", std::to_string(i), report.ds_per_keypoint[i]);
    for (std::size_t i = 0; i < report.ae_per_keypoint.size(); ++i) row("AE", std::to_string(i), report.ae_per_keypoint[i]);
    return out;
}

MotionRecord load_record(const std::filesystem::path& path)
{
    const auto doc = json_util::read_file(path);
    if (!doc.is_object() || !doc.contains("frames") || !doc["frames"].is_array())
        fail(ErrorCode::Parse, path.string() + ": expected an object with a \"frames\" array");
    MotionRecord rec;
    try {
        for (std::size_t t = 0; t < doc["frames"].size(); ++t)
            rec.frames.push_back(json_util::points(doc["frames"][t], "frames[" + std::to_string(t) + "]"));
        rec.validate();
    } catch (const Error& e) {
        fail(e.code(), path.string() + ": " + e.what());
    }
    return rec;
}

void save_record(const MotionRecord& record, const std::filesystem::path& path)
{
    record.validate();
    nlohmann::json frames = nlohmann::json::array();
    for (const auto& f : record.frames) frames.push_back(json_util::to_json(f));
    json_util::write_file(path, {{"frames", frames}});
}

} // namespace flexmesh::metrics
