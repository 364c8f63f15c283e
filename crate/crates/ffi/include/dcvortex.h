#ifndef DCVORTEX_H
#define DCVORTEX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DcvStatus {
  DCV_STATUS_OK = 0,
  DCV_STATUS_NULL_POINTER = 1,
  DCV_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Malformed OBJ, JSON or UTF-8 input.
   */
  DCV_STATUS_PARSE = 3,
  /**
   * Non-manifold or otherwise invalid triangulation.
   */
  DCV_STATUS_INVALID_MESH = 4,
  /**
   * Problem could not be set up (bad vertices, excluded constants,
   * inadmissible source metric, ...).
   */
  DCV_STATUS_PROBLEM = 5,
  DCV_STATUS_BUFFER_TOO_SMALL = 6,
  DCV_STATUS_IO = 7,
  DCV_STATUS_PANIC = 8,
} DcvStatus;

/**
 * Outcome of a Newton solve, mirroring the library status.
 */
typedef enum DcvSolveStatus {
  DCV_SOLVE_STATUS_CONVERGED = 0,
  DCV_SOLVE_STATUS_MAX_ITER = 1,
  DCV_SOLVE_STATUS_INFEASIBLE_START = 2,
  DCV_SOLVE_STATUS_LINE_SEARCH_STALL = 3,
} DcvSolveStatus;

/**
 * Opaque triangle mesh with vertex positions.
 */
typedef struct DcvMesh DcvMesh;

/**
 * Opaque solver result.
 */
typedef struct DcvSolution DcvSolution;

typedef struct DcvSolverOptions {
  double grad_tol;
  uint32_t max_iterations;
} DcvSolverOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *dcv_version(void);

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *dcv_last_error_message(void);

struct DcvSolverOptions dcv_solver_options_default(void);

/**
 * Milnor's Lobachevsky function.
 */
double dcv_lobachevsky(double x);

/**
 * Parses an OBJ document of `len` bytes.
 *
 * # Safety
 * `data` must point to `len` readable bytes and `out` to writable storage
 * for one pointer.
 */
enum DcvStatus dcv_mesh_from_obj(const uint8_t *data, size_t len, struct DcvMesh **out);

/**
 * Reads an OBJ file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum DcvStatus dcv_mesh_load_obj(const char *path, struct DcvMesh **out);

/**
 * Builds a mesh from `3 * vertex_count` coordinates and `3 * face_count`
 * zero-based vertex indices.
 *
 * # Safety
 * The arrays must have the stated lengths and `out` must be writable.
 */
enum DcvStatus dcv_mesh_from_arrays(const double *positions,
                                    size_t vertex_count,
                                    const uint32_t *faces,
                                    size_t face_count,
                                    struct DcvMesh **out);

/**
 * # Safety
 * `mesh` must be NULL or a handle from a `dcv_mesh_*` constructor that has
 * not been freed.
 */
void dcv_mesh_free(struct DcvMesh *mesh);

/**
 * Number of vertices, or 0 for a NULL handle.
 *
 * # Safety
 * `mesh` must be NULL or a live handle.
 */
size_t dcv_mesh_vertex_count(const struct DcvMesh *mesh);

/**
 * # Safety
 * `mesh` must be NULL or a live handle.
 */
size_t dcv_mesh_face_count(const struct DcvMesh *mesh);

/**
 * # Safety
 * `mesh` must be NULL or a live handle.
 */
size_t dcv_mesh_edge_count(const struct DcvMesh *mesh);

/**
 * # Safety
 * `mesh` must be NULL or a live handle.
 */
int64_t dcv_mesh_euler_characteristic(const struct DcvMesh *mesh);

/**
 * Solves a problem given as a JSON document (vortex or mapping mode).
 * A solve that stops without converging still returns `DCV_STATUS_OK`;
 * query `dcv_solution_status`.
 *
 * # Safety
 * `mesh` must be a live handle, `problem_json` a NUL-terminated string,
 * `options` NULL (defaults) or valid, and `out` writable.
 */
enum DcvStatus dcv_solve_json(const struct DcvMesh *mesh,
                              const char *problem_json,
                              const struct DcvSolverOptions *options,
                              struct DcvSolution **out);

/**
 * Solves a vortex problem with the named preset (`"taubes"`, `"bradlow"`,
 * `"ambjorn-olesen"`, `"jackiw-pi"`, `"popov"`), `count` centers at
 * `vertices` with multiplicities `multiplicities`, boundary pinned at zero.
 *
 * # Safety
 * `preset` must be a NUL-terminated string, both arrays must hold `count`
 * entries, `options` NULL or valid, and `out` writable.
 */
enum DcvStatus dcv_vortex_solve(const struct DcvMesh *mesh,
                                const char *preset,
                                const size_t *vertices,
                                const uint32_t *multiplicities,
                                size_t count,
                                double length_scale,
                                const struct DcvSolverOptions *options,
                                struct DcvSolution **out);

/**
 * # Safety
 * `solution` must be NULL or a live handle.
 */
void dcv_solution_free(struct DcvSolution *solution);

/**
 * # Safety
 * `solution` must be a live handle and `out` writable.
 */
enum DcvStatus dcv_solution_status(const struct DcvSolution *solution, enum DcvSolveStatus *out);

/**
 * Newton iterations taken, or 0 for a NULL handle.
 *
 * # Safety
 * `solution` must be NULL or a live handle.
 */
size_t dcv_solution_iterations(const struct DcvSolution *solution);

/**
 * Max-norm of the final gradient; NaN for a NULL handle or an infeasible start.
 *
 * # Safety
 * `solution` must be NULL or a live handle.
 */
double dcv_solution_grad_norm(const struct DcvSolution *solution);

/**
 * # Safety
 * `solution` must be NULL or a live handle.
 */
size_t dcv_solution_vertex_count(const struct DcvSolution *solution);

/**
 * Copies the scale factors `u` (one per vertex) into `out`.
 *
 * # Safety
 * `solution` must be a live handle and `out` must hold `len` doubles.
 */
enum DcvStatus dcv_solution_u(const struct DcvSolution *solution, double *out, size_t len);

/**
 * Copies the Higgs amplitude `e^u` (one per vertex) into `out`.
 *
 * # Safety
 * `solution` must be a live handle and `out` must hold `len` doubles.
 */
enum DcvStatus dcv_solution_higgs_amplitude(const struct DcvSolution *solution,
                                            double *out,
                                            size_t len);

/**
 * Writes the solution JSON into `buf`. Call with `buf = NULL` and
 * `capacity = 0` to learn the size through `needed`.
 *
 * # Safety
 * `solution` must be a live handle, `buf` NULL or writable for `capacity`
 * bytes, and `needed` NULL or writable.
 */
enum DcvStatus dcv_solution_to_json(const struct DcvSolution *solution,
                                    char *buf,
                                    size_t capacity,
                                    size_t *needed);

/**
 * Writes `solution.json` and `solution.csv` into the directory `dir`.
 *
 * # Safety
 * `solution` must be a live handle and `dir` a NUL-terminated string.
 */
enum DcvStatus dcv_solution_write(const struct DcvSolution *solution, const char *dir);

/**
 * Renders `levels` level curves of `e^u` over a planar mesh as SVG.
 * Sizing works as in `dcv_solution_to_json`.
 *
 * # Safety
 * Handles must be live, `buf` NULL or writable for `capacity` bytes, and
 * `needed` NULL or writable.
 */
enum DcvStatus dcv_contours_svg(const struct DcvMesh *mesh,
                                const struct DcvSolution *solution,
                                size_t levels,
                                char *buf,
                                size_t capacity,
                                size_t *needed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DCVORTEX_H */
