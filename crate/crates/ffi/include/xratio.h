/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef XRATIO_H
#define XRATIO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of an FFI call. Values 1 to 3 mirror the `xr` exit codes.
 */
typedef enum XrStatus {
  XR_STATUS_OK = 0,
  /**
   * Malformed input: bad JSON, wrong dimensions, invalid parameters.
   */
  XR_STATUS_INVALID_INPUT = 1,
  /**
   * Geometric degeneracy, e.g. non-opposite flags where a finite value is needed.
   */
  XR_STATUS_DEGENERATE = 2,
  /**
   * A verification (Moebius audit, tree extension, calibration) failed.
   */
  XR_STATUS_VERIFICATION_FAILED = 3,
  /**
   * A required pointer argument was null.
   */
  XR_STATUS_NULL_POINTER = 4,
  /**
   * A Rust panic was caught; this is a bug.
   */
  XR_STATUS_INTERNAL = 5,
} XrStatus;

/**
 * Kind of an extended real value.
 */
typedef enum XrKind {
  XR_KIND_FINITE = 0,
  XR_KIND_PLUS_INF = 1,
  XR_KIND_MINUS_INF = 2,
} XrKind;

/**
 * Flag in ℝⁿ.
 */
typedef struct XrFlag XrFlag;

/**
 * Boundary map sampled on finitely many flags.
 */
typedef struct XrMap XrMap;

/**
 * Weighted product of factors.
 */
typedef struct XrProduct XrProduct;

/**
 * Quadruple of flags (x, y, z, w).
 */
typedef struct XrQuad XrQuad;

/**
 * Point of the symmetric space of positive definite matrices.
 */
typedef struct XrSpd XrSpd;

/**
 * Finite metric tree with labelled ends.
 */
typedef struct XrTree XrTree;

/**
 * Type vector (a point of the model chamber).
 */
typedef struct XrType XrType;

/**
 * An extended real; `value` is meaningful only when `kind` is `Finite`.
 */
typedef struct XrExtended {
  enum XrKind kind;
  double value;
} XrExtended;

/**
 * Summary of a Moebius audit.
 */
typedef struct XrMoebiusReport {
  double max_deviation;
  size_t quadruples;
  size_t mismatches;
  bool is_moebius;
} XrMoebiusReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *xr_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *xr_version(void);

/**
 * Type vector from `{"n", "values", "mults"?}`.
 *
 * # Safety
 * `json` must be NUL-terminated and `out` a valid pointer.
 */
enum XrStatus xr_type_from_json(const char *json, struct XrType **out);

/**
 * Flag from `{"basis": [columns], "signature"?, "n"?}`.
 *
 * # Safety
 * `json` must be NUL-terminated and `out` a valid pointer.
 */
enum XrStatus xr_flag_from_json(const char *json, struct XrFlag **out);

/**
 * Positive definite point from `{"mat": rows}`.
 *
 * # Safety
 * `json` must be NUL-terminated and `out` a valid pointer.
 */
enum XrStatus xr_spd_from_json(const char *json, struct XrSpd **out);

/**
 * Quadruple from `{"x", "y", "z", "w"}` flag records.
 *
 * # Safety
 * `json` must be NUL-terminated and `out` a valid pointer.
 */
enum XrStatus xr_quad_from_json(const char *json, struct XrQuad **out);

/**
 * Tree from `{"vertices", "edges": [[u, v, len]], "ends": [[end, vertex]]}`.
 *
 * # Safety
 * `json` must be NUL-terminated and `out` a valid pointer.
 */
enum XrStatus xr_tree_from_json(const char *json, struct XrTree **out);

/**
 * Product space from `{"factors", "weights"}`.
 *
 * # Safety
 * `json` must be NUL-terminated and `out` a valid pointer.
 */
enum XrStatus xr_product_from_json(const char *json, struct XrProduct **out);

/**
 * Sampled map from `{"domain", "images", "provenance"?}`.
 *
 * # Safety
 * `json` must be NUL-terminated and `out` a valid pointer.
 */
enum XrStatus xr_map_from_json(const char *json, struct XrMap **out);

/**
 * Releases a handle created by one of the `xr_type_*` constructors; NULL is ignored.
 *
 * # Safety
 * `p` must come from this library and not be used afterwards.
 */
void xr_type_free(struct XrType *p);

/**
 * Releases a handle created by one of the `xr_flag_*` constructors; NULL is ignored.
 *
 * # Safety
 * `p` must come from this library and not be used afterwards.
 */
void xr_flag_free(struct XrFlag *p);

/**
 * Releases a handle created by one of the `xr_spd_*` constructors; NULL is ignored.
 *
 * # Safety
 * `p` must come from this library and not be used afterwards.
 */
void xr_spd_free(struct XrSpd *p);

/**
 * Releases a handle created by one of the `xr_quad_*` constructors; NULL is ignored.
 *
 * # Safety
 * `p` must come from this library and not be used afterwards.
 */
void xr_quad_free(struct XrQuad *p);

/**
 * Releases a handle created by one of the `xr_tree_*` constructors; NULL is ignored.
 *
 * # Safety
 * `p` must come from this library and not be used afterwards.
 */
void xr_tree_free(struct XrTree *p);

/**
 * Releases a handle created by one of the `xr_product_*` constructors; NULL is ignored.
 *
 * # Safety
 * `p` must come from this library and not be used afterwards.
 */
void xr_product_free(struct XrProduct *p);

/**
 * Releases a handle created by one of the `xr_map_*` constructors; NULL is ignored.
 *
 * # Safety
 * `p` must come from this library and not be used afterwards.
 */
void xr_map_free(struct XrMap *p);

/**
 * Type vector with `len` distinct values (decreasing) and multiplicities
 * summing to n.
 *
 * # Safety
 * `values` and `mults` must point to `len` elements; `out` must be valid.
 */
enum XrStatus xr_type_new(size_t n,
                          const double *values,
                          const size_t *mults,
                          size_t len,
                          struct XrType **out);

/**
 * Full flag spanned by the columns of an n×n column-major matrix.
 *
 * # Safety
 * `cols` must point to n·n doubles; `out` must be valid.
 */
enum XrStatus xr_flag_full(size_t n, const double *cols, struct XrFlag **out);

/**
 * Quadruple from four flags (copied).
 *
 * # Safety
 * All pointers must be valid handles; `out` must be valid.
 */
enum XrStatus xr_quad_new(const struct XrFlag *x,
                          const struct XrFlag *y,
                          const struct XrFlag *z,
                          const struct XrFlag *w,
                          struct XrQuad **out);

/**
 * Dimension n of a type vector.
 *
 * # Safety
 * `t` must be a valid handle or NULL (returns 0).
 */
size_t xr_type_dim(const struct XrType *t);

/**
 * Closed-form Gromov product (x|y)_o of type `t`; `base` may be NULL for
 * the identity. Non-opposite flags give kind `PlusInf` with status Ok.
 *
 * # Safety
 * Handles must be valid (`base` may be NULL); `out` must be valid.
 */
enum XrStatus xr_gromov(const struct XrType *t,
                        const struct XrFlag *x,
                        const struct XrFlag *y,
                        const struct XrSpd *base,
                        struct XrExtended *out);

/**
 * Scalar cross ratio cr_t(x, y, z, w); `base` may be NULL. Infinite
 * values follow the admissibility conventions and return status Ok;
 * inadmissible quadruples return `Degenerate`.
 *
 * # Safety
 * Handles must be valid (`base` may be NULL); `out` must be valid.
 */
enum XrStatus xr_cr(const struct XrType *t,
                    const struct XrQuad *q,
                    const struct XrSpd *base,
                    struct XrExtended *out);

/**
 * Vector-valued cross ratio over the face with dimension list `dims`
 * (NULL/0 for the full face), written to `dst[0..n]`. `kind` receives
 * the extended kind; `dst` is filled only when finite.
 *
 * # Safety
 * `dims` must hold `dims_len` elements; `dst` must hold `len` doubles.
 */
enum XrStatus xr_cr_vector(const struct XrQuad *q,
                           const size_t *dims,
                           size_t dims_len,
                           enum XrKind *kind,
                           double *dst,
                           size_t len);

/**
 * Flat coordinates of the retract word ρ_x ρ_w ρ_z ρ_y applied to `base`
 * (NULL for the canonical point of the flat through x and y).
 *
 * # Safety
 * Handles must be valid (`base` may be NULL); `dst` must hold `len` doubles.
 */
enum XrStatus xr_geom_interp(const struct XrQuad *q,
                             const struct XrSpd *base,
                             double *dst,
                             size_t len);

/**
 * Period of a regular hyperbolic g ∈ SL(n) (row-major n×n) against a
 * generic full flag x: writes cr_σ(g⁻, g·x, g⁺, x) to `dst[0..n]`.
 *
 * # Safety
 * `g` must point to n·n doubles; `dst` must hold `len` doubles.
 */
enum XrStatus xr_period(size_t n, const double *g, const struct XrFlag *x, double *dst, size_t len);

/**
 * Fitted metric constant from `trials` random pairs.
 *
 * # Safety
 * `out` must be valid.
 */
enum XrStatus xr_calibrate(size_t n, size_t trials, uint64_t seed, double *out);

/**
 * Gromov product of ends z, w seen from vertex o.
 *
 * # Safety
 * Strings must be NUL-terminated; handles and `out` must be valid.
 */
enum XrStatus xr_tree_gromov(const struct XrTree *t,
                             const char *z,
                             const char *w,
                             const char *o,
                             double *out);

/**
 * Cross ratio of four ends.
 *
 * # Safety
 * Strings must be NUL-terminated; handles and `out` must be valid.
 */
enum XrStatus xr_tree_cr(const struct XrTree *t,
                         const char *z1,
                         const char *w1,
                         const char *z2,
                         const char *w2,
                         struct XrExtended *out);

/**
 * Checks that the end bijection `map_json` (`{"end": "image", …}`)
 * preserves cross ratios and extends to an isometry on median vertices,
 * within `tol` (≤ 0 for the default). Reports the largest distance distortion.
 *
 * # Safety
 * Handles must be valid; `map_json` NUL-terminated; `distortion` valid.
 */
enum XrStatus xr_tree_extend(const struct XrTree *source,
                             const struct XrTree *target,
                             const char *map_json,
                             double tol,
                             double *distortion);

/**
 * Cross ratio in a product space of the quadruple given as JSON
 * (`{"x": [factor points], …}`).
 *
 * # Safety
 * Handle must be valid; `quad_json` NUL-terminated; `out` valid.
 */
enum XrStatus xr_product_cr(const struct XrProduct *p,
                            const char *quad_json,
                            struct XrExtended *out);

/**
 * Audits a sampled map against type `t` (same type on the codomain).
 * `threshold` ≤ 0 selects the default. A negative verdict fills `out`
 * and returns `VerificationFailed`.
 *
 * # Safety
 * Handles must be valid; `out` must be valid.
 */
enum XrStatus xr_moebius_check(const struct XrMap *f,
                               const struct XrType *t,
                               double threshold,
                               uint64_t seed,
                               struct XrMoebiusReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* XRATIO_H */
