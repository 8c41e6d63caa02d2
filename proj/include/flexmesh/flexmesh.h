#ifndef FLEXMESH_FLEXMESH_H
#define FLEXMESH_FLEXMESH_H

#include <stddef.h>
#include <stdint.h>

#if defined(FLEXMESH_BUILDING_LIBRARY)
#define FM_API __attribute__((visibility("default")))
#else
#define FM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fm_status {
    FM_OK = 0,
    FM_ERR_INVALID_ARGUMENT = 1,
    FM_ERR_SHAPE_MISMATCH = 2,
    FM_ERR_IO = 3,
    FM_ERR_PARSE = 4,
    FM_ERR_INDEX_OUT_OF_RANGE = 5,
    FM_ERR_DUPLICATE_KEYPOINT = 6,
    FM_ERR_DEGENERATE_FACE = 7,
    FM_ERR_SINGULAR_SYSTEM = 8,
    FM_ERR_NON_FINITE = 9,
    FM_ERR_DIVERGENCE = 10,
    FM_ERR_ORACLE = 11,
    FM_ERR_TOLERANCE = 12,
    FM_ERR_INTERNAL = 13
} fm_status;

typedef struct fm_mesh fm_mesh;
typedef struct fm_solver fm_solver;
typedef struct fm_config fm_config;

FM_API const char* fm_version(void);

/* Message of the most recent failure on the calling thread ("" if none). */
FM_API const char* fm_last_error(void);

FM_API const char* fm_status_name(fm_status status);

/* Process exit code for a status: 0 ok, 1 numeric failure, 2 input/IO/config. */
FM_API int fm_status_exit_code(fm_status status);

/* Meshes. xy holds 2*vertex_count doubles, faces 3*face_count indices. */
FM_API fm_status fm_mesh_create(const double* xy, size_t vertex_count, const int32_t* faces, size_t face_count,
                                const int32_t* keypoints, size_t keypoint_count, fm_mesh** out);
FM_API fm_status fm_mesh_load(const char* path, fm_mesh** out);
FM_API fm_status fm_mesh_counts(const fm_mesh* mesh, size_t* vertices, size_t* faces, size_t* keypoints);
FM_API void fm_mesh_destroy(fm_mesh* mesh);

/* Factorized Poisson system for a mesh and keypoint weight. */
FM_API fm_status fm_solver_create(const fm_mesh* mesh, double constraint_weight, fm_solver** out);
/* jacobians: 4*face_count (row-major 2x2 per face); targets: 2*keypoint_count;
   out_vertices: 2*vertex_count. */
FM_API fm_status fm_solver_solve(const fm_solver* solver, const double* jacobians, const double* targets,
                                 double* out_vertices);
/* Per-face Jacobians of a vertex set, 4*face_count values. */
FM_API fm_status fm_solver_jacobians(const fm_solver* solver, const double* vertices, double* out_jacobians);
FM_API void fm_solver_destroy(fm_solver* solver);

FM_API fm_status fm_bernstein(double u, double out[4]);

/* positions: frames x keypoints x 2, row-major. */
FM_API fm_status fm_metrics_compute(const double* positions, size_t frames, size_t keypoints, double* ds, double* ae);

FM_API fm_status fm_config_create(fm_config** out);
/* Keys as in the config file; '-' and '_' are interchangeable. */
FM_API fm_status fm_config_set(fm_config* config, const char* key, const char* value);
FM_API fm_status fm_config_load_file(fm_config* config, const char* path);
FM_API void fm_config_destroy(fm_config* config);

FM_API fm_status fm_run_fit_rest(const fm_config* config, double* objective);
FM_API fm_status fm_run_animate(const fm_config* config);
/* *csv_out is owned by the caller; release with fm_string_free. */
FM_API fm_status fm_run_metrics(const fm_config* config, const char* record_path, char** csv_out);
/* Returns FM_OK with *passed = 0 when the covariance check fails. */
FM_API fm_status fm_run_pfode_demo(const fm_config* config, int* passed, double* max_error);
FM_API void fm_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
