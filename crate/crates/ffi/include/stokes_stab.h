#ifndef STOKES_STAB_H
#define STOKES_STAB_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum StokesStatus {
  STOKES_STATUS_OK = 0,
  STOKES_STATUS_NULL_POINTER = 1,
  STOKES_STATUS_INVALID_ARGUMENT = 2,
  STOKES_STATUS_MESH = 3,
  STOKES_STATUS_SOLVER = 4,
  STOKES_STATUS_IO = 5,
  STOKES_STATUS_BUFFER_TOO_SMALL = 6,
  STOKES_STATUS_PANIC = 7,
} StokesStatus;

typedef enum StokesPair {
  STOKES_PAIR_P1P1 = 0,
  STOKES_PAIR_P2P1 = 1,
} StokesPair;

// Opaque triangulation.
typedef struct StokesMesh StokesMesh;

// Opaque discrete solution with its estimator report.
typedef struct StokesSolution StokesSolution;

// Scalar results of a solve. Unavailable quantities are NaN.
typedef struct StokesSummary {
  double alpha;
  // Inverse-inequality constant; NaN when unbounded.
  double ci;
  double eta;
  double osc_f;
  double osc_t;
  double err_h1_u;
  double err_l2_p;
  double effectivity;
} StokesSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty if none. The
// pointer stays valid until the next failing call on the thread.
const char *stokes_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *stokes_version(void);

// Structured mesh of a built-in case (`SMOOTH_SQUARE`, `NEUMANN_STRIP`,
// `NONZERO_G`, `LSHAPE_PEAK`) with `n` subdivisions.
//
// # Safety
// `case_name` is a NUL-terminated string; `out` is writable.
enum StokesStatus stokes_mesh_for_case(const char *case_name, size_t n, struct StokesMesh **out);

// Reads a mesh in the plain-text format. The mesh is not audited.
//
// # Safety
// `path` is a NUL-terminated string; `out` is writable.
enum StokesStatus stokes_mesh_read(const char *path, struct StokesMesh **out);

// # Safety
// `mesh` is a live handle; `path` is a NUL-terminated string.
enum StokesStatus stokes_mesh_write(const struct StokesMesh *mesh, const char *path);

// New mesh with every triangle split into four.
//
// # Safety
// `mesh` is a live handle; `out` is writable.
enum StokesStatus stokes_mesh_refine_uniform(const struct StokesMesh *mesh,
                                             struct StokesMesh **out);

// New mesh after newest-vertex bisection of the `n_marked` listed
// triangles and their conforming closure.
//
// # Safety
// `mesh` is a live handle; `marked` is readable for `n_marked` entries
// (may be null when `n_marked` is 0); `out` is writable.
enum StokesStatus stokes_mesh_refine_marked(const struct StokesMesh *mesh,
                                            const size_t *marked,
                                            size_t n_marked,
                                            struct StokesMesh **out);

// # Safety
// `mesh` is a live handle; each output pointer is null or writable.
enum StokesStatus stokes_mesh_counts(const struct StokesMesh *mesh,
                                     size_t *n_vertices,
                                     size_t *n_triangles,
                                     size_t *n_edges);

// Runs the mesh audit with the given minimum angle in degrees. Returns
// `Ok` when the checks pass and `Mesh` otherwise, with the failed checks
// in the last error message.
//
// # Safety
// `mesh` is a live handle.
enum StokesStatus stokes_mesh_audit(const struct StokesMesh *mesh, double min_angle_deg);

// # Safety
// `mesh` is null or a handle not yet freed.
void stokes_mesh_free(struct StokesMesh *mesh);

// Solves a built-in case on `mesh`. `alpha` NaN selects the default
// stabilization parameter.
//
// # Safety
// `mesh` is a live handle; `case_name` is a NUL-terminated string; `out`
// is writable.
enum StokesStatus stokes_solve_case(const struct StokesMesh *mesh,
                                    const char *case_name,
                                    enum StokesPair pair,
                                    double alpha,
                                    struct StokesSolution **out);

// # Safety
// `solution` is a live handle; `out` is writable.
enum StokesStatus stokes_solution_summary(const struct StokesSolution *solution,
                                          struct StokesSummary *out);

// Velocity coefficients, interleaved `(x, y)` per node: vertices first,
// then edge midpoints for `P2P1`. `written` receives the required length
// even when the buffer is too small.
//
// # Safety
// `solution` is a live handle; `buf` is writable for `capacity` values or
// null with `capacity` 0; `written` is null or writable.
enum StokesStatus stokes_solution_velocity(const struct StokesSolution *solution,
                                           double *buf,
                                           size_t capacity,
                                           size_t *written);

// Pressure per mesh vertex.
//
// # Safety
// As [`stokes_solution_velocity`].
enum StokesStatus stokes_solution_pressure(const struct StokesSolution *solution,
                                           double *buf,
                                           size_t capacity,
                                           size_t *written);

// Element indicators `eta_K` per triangle.
//
// # Safety
// As [`stokes_solution_velocity`].
enum StokesStatus stokes_solution_eta(const struct StokesSolution *solution,
                                      double *buf,
                                      size_t capacity,
                                      size_t *written);

// Marking indicators per triangle; they sum to `eta^2`.
//
// # Safety
// As [`stokes_solution_velocity`].
enum StokesStatus stokes_solution_marking_indicators(const struct StokesSolution *solution,
                                                     double *buf,
                                                     size_t capacity,
                                                     size_t *written);

// # Safety
// `solution` is null or a handle not yet freed.
void stokes_solution_free(struct StokesSolution *solution);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STOKES_STAB_H */
