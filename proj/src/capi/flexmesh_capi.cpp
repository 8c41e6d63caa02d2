#include "flexmesh/flexmesh.h"

#include "common/error.hpp"
#include "deform/solver.hpp"
#include "mesh/mesh_io.hpp"
#include "metrics/metrics.hpp"
#include "pipeline/commands.hpp"
#include "pipeline/config.hpp"

#include <cstring>
#include <iostream>
#include <memory>
#include <string>

using namespace flexmesh;

struct fm_mesh
{
    mesh::TriMesh mesh;
};

struct fm_solver
{
    std::shared_ptr<const mesh::DifferentialOperators> ops;
    deform::FactorizedSystem system;
};

struct fm_config
{
    pipeline::RunConfig config;
};

namespace {

thread_local std::string g_last_error;

fm_status status_of(ErrorCode c)
{
    switch (c) {
    case ErrorCode::InvalidArgument: return FM_ERR_INVALID_ARGUMENT;
    case ErrorCode::ShapeMismatch: return FM_ERR_SHAPE_MISMATCH;
    case ErrorCode::Io: return FM_ERR_IO;
    case ErrorCode::Parse: return FM_ERR_PARSE;
    case ErrorCode::IndexOutOfRange: return FM_ERR_INDEX_OUT_OF_RANGE;
    case ErrorCode::DuplicateKeypoint: return FM_ERR_DUPLICATE_KEYPOINT;
    case ErrorCode::DegenerateFace: return FM_ERR_DEGENERATE_FACE;
    case ErrorCode::SingularSystem: return FM_ERR_SINGULAR_SYSTEM;
    case ErrorCode::NonFinite: return FM_ERR_NON_FINITE;
    case ErrorCode::Divergence: return FM_ERR_DIVERGENCE;
    case ErrorCode::Oracle: return FM_ERR_ORACLE;
    case ErrorCode::Tolerance: return FM_ERR_TOLERANCE;
    }
    return FM_ERR_INTERNAL;
}

template <typename F>
fm_status guarded(F&& body)
{
    try {
        body();
        g_last_error.clear();
        return FM_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
    } catch (const std::exception& e) {
        g_last_error = e.what();
    } catch (...) {
        g_last_error = "unknown error";
    }
    return FM_ERR_INTERNAL;
}

void need(const void* p, const char* what)
{
    if (!p) fail(ErrorCode::InvalidArgument, std::string(what) + " is null");
}

} // namespace

extern "C" {

const char* fm_version(void)
{
    return "1.0.0";
}

const char* fm_last_error(void)
{
    return g_last_error.c_str();
}

const char* fm_status_name(fm_status status)
{
    switch (status) {
    case FM_OK: return "ok";
    case FM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case FM_ERR_SHAPE_MISMATCH: return "shape mismatch";
    case FM_ERR_IO: return "i/o error";
    case FM_ERR_PARSE: return "parse error";
    case FM_ERR_INDEX_OUT_OF_RANGE: return "index out of range";
    case FM_ERR_DUPLICATE_KEYPOINT: return "duplicate keypoint";
    case FM_ERR_DEGENERATE_FACE: return "degenerate face";
    case FM_ERR_SINGULAR_SYSTEM: return "singular system";
    case FM_ERR_NON_FINITE: return "non-finite value";
    case FM_ERR_DIVERGENCE: return "divergence";
    case FM_ERR_ORACLE: return "oracle failure";
    case FM_ERR_TOLERANCE: return "tolerance exceeded";
    case FM_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

int fm_status_exit_code(fm_status status)
{
    switch (status) {
    case FM_OK: return 0;
    case FM_ERR_SINGULAR_SYSTEM:
    case FM_ERR_NON_FINITE:
    case FM_ERR_DIVERGENCE:
    case FM_ERR_ORACLE:
    case FM_ERR_TOLERANCE:
    case FM_ERR_INTERNAL: return 1;
    default: return 2;
    }
}

fm_status fm_mesh_create(const double* xy, size_t vertex_count, const int32_t* faces, size_t face_count,
                         const int32_t* keypoints, size_t keypoint_count, fm_mesh** out)
{
    return guarded([&] {
        need(out, "out");
        need(xy, "xy");
        need(faces, "faces");
        if (keypoint_count) need(keypoints, "keypoints");
        Positions v(static_cast<Eigen::Index>(vertex_count), 2);
        for (size_t i = 0; i < vertex_count; ++i) v.row(static_cast<Eigen::Index>(i)) << xy[2 * i], xy[2 * i + 1];
        std::vector<mesh::Face> f(face_count);
        for (size_t i = 0; i < face_count; ++i) f[i] = {faces[3 * i], faces[3 * i + 1], faces[3 * i + 2]};
        std::vector<int> k(keypoints, keypoints + keypoint_count);
        *out = new fm_mesh{mesh::TriMesh(std::move(v), std::move(f), std::move(k))};
    });
}

fm_status fm_mesh_load(const char* path, fm_mesh** out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new fm_mesh{mesh::load_mesh(path)};
    });
}

fm_status fm_mesh_counts(const fm_mesh* m, size_t* vertices, size_t* faces, size_t* keypoints)
{
    return guarded([&] {
        need(m, "mesh");
        if (vertices) *vertices = static_cast<size_t>(m->mesh.vertex_count());
        if (faces) *faces = static_cast<size_t>(m->mesh.face_count());
        if (keypoints) *keypoints = static_cast<size_t>(m->mesh.keypoint_count());
    });
}

void fm_mesh_destroy(fm_mesh* m)
{
    delete m;
}

fm_status fm_solver_create(const fm_mesh* m, double constraint_weight, fm_solver** out)
{
    return guarded([&] {
        need(m, "mesh");
        need(out, "out");
        auto ops = std::make_shared<const mesh::DifferentialOperators>(m->mesh);
        auto sys = deform::assemble(ops, constraint_weight);
        *out = new fm_solver{ops, std::move(sys)};
    });
}

fm_status fm_solver_solve(const fm_solver* s, const double* jacobians, const double* targets, double* out_vertices)
{
    return guarded([&] {
        need(s, "solver");
        need(jacobians, "jacobians");
        need(targets, "targets");
        need(out_vertices, "out_vertices");
        const auto& mesh = s->ops->mesh();
        const Eigen::VectorXd flat = Eigen::Map<const Eigen::VectorXd>(jacobians, 4 * mesh.face_count());
        Positions t(mesh.keypoint_count(), 2);
        for (int i = 0; i < mesh.keypoint_count(); ++i) t.row(i) << targets[2 * i], targets[2 * i + 1];
        const Positions v = deform::solve(s->system, mesh::JacobianField::unflatten(flat), {t, s->system.weight()});
        for (int i = 0; i < mesh.vertex_count(); ++i) {
            out_vertices[2 * i] = v(i, 0);
            out_vertices[2 * i + 1] = v(i, 1);
        }
    });
}

fm_status fm_solver_jacobians(const fm_solver* s, const double* vertices, double* out_jacobians)
{
    return guarded([&] {
        need(s, "solver");
        need(vertices, "vertices");
        need(out_jacobians, "out_jacobians");
        const int n = s->ops->vertex_count();
        Positions v(n, 2);
        for (int i = 0; i < n; ++i) v.row(i) << vertices[2 * i], vertices[2 * i + 1];
        const Eigen::VectorXd flat = s->ops->jacobians(v).flatten();
        std::memcpy(out_jacobians, flat.data(), sizeof(double) * static_cast<size_t>(flat.size()));
    });
}

void fm_solver_destroy(fm_solver* s)
{
    delete s;
}

fm_status fm_bernstein(double u, double out[4])
{
    return guarded([&] {
        need(out, "out");
        const auto b = trajectory::bernstein(u);
        for (int j = 0; j < 4; ++j) out[j] = b[static_cast<size_t>(j)];
    });
}

fm_status fm_metrics_compute(const double* positions, size_t frames, size_t keypoints, double* ds, double* ae)
{
    return guarded([&] {
        need(positions, "positions");
        metrics::MotionRecord rec;
        for (size_t t = 0; t < frames; ++t) {
            Positions p(static_cast<Eigen::Index>(keypoints), 2);
            for (size_t i = 0; i < keypoints; ++i)
                p.row(static_cast<Eigen::Index>(i)) << positions[(t * keypoints + i) * 2],
                    positions[(t * keypoints + i) * 2 + 1];
            rec.frames.push_back(std::move(p));
        }
        if (ds) *ds = metrics::deformation_smoothness(rec);
        if (ae) *ae = metrics::animation_energy(rec);
    });
}

fm_status fm_config_create(fm_config** out)
{
    return guarded([&] {
        need(out, "out");
        *out = new fm_config{};
    });
}

fm_status fm_config_set(fm_config* c, const char* key, const char* value)
{
    return guarded([&] {
        need(c, "config");
        need(key, "key");
        need(value, "value");
        pipeline::apply_setting(c->config, key, value);
    });
}

fm_status fm_config_load_file(fm_config* c, const char* path)
{
    return guarded([&] {
        need(c, "config");
        need(path, "path");
        pipeline::apply_config_file(c->config, path);
    });
}

void fm_config_destroy(fm_config* c)
{
    delete c;
}

fm_status fm_run_fit_rest(const fm_config* c, double* objective)
{
    return guarded([&] {
        need(c, "config");
        const auto s = pipeline::cmd_fit_rest(c->config, std::cout);
        if (objective) *objective = s.objective;
    });
}

fm_status fm_run_animate(const fm_config* c)
{
    return guarded([&] {
        need(c, "config");
        pipeline::cmd_animate(c->config, std::cout);
    });
}

fm_status fm_run_metrics(const fm_config* c, const char* record_path, char** csv_out)
{
    return guarded([&] {
        need(c, "config");
        need(record_path, "record_path");
        need(csv_out, "csv_out");
        const std::string csv = pipeline::cmd_metrics(record_path, c->config);
        char* buf = new char[csv.size() + 1];
        std::memcpy(buf, csv.c_str(), csv.size() + 1);
        *csv_out = buf;
    });
}

fm_status fm_run_pfode_demo(const fm_config* c, int* passed, double* max_error)
{
    return guarded([&] {
        need(c, "config");
        const auto rep = pipeline::cmd_pfode_demo(c->config, std::cout);
        if (passed) *passed = rep.passed ? 1 : 0;
        if (max_error) *max_error = rep.max_error;
    });
}

void fm_string_free(char* s)
{
    delete[] s;
}

} // extern "C"
