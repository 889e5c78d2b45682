#ifndef EGN_CAPI_H
#define EGN_CAPI_H

/* Generated by cbindgen from the egn-capi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Cohomology backend selector for [`egn_hh_dimension`].
 */
typedef enum EgnHhMethod {
  /**
   * Comparison complex from the minimal resolution; self-dual case only.
   */
  EGN_HH_METHOD_RESOLUTION = 0,
  /**
   * Reduced bar complex; any valid parameter pair.
   */
  EGN_HH_METHOD_BAR = 1,
} EgnHhMethod;

/**
 * Result of every fallible call in this interface.
 */
typedef enum EgnStatus {
  /**
   * The call succeeded.
   */
  EGN_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  EGN_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  EGN_STATUS_INVALID_UTF8 = 2,
  /**
   * The input failed to parse or violated a validity constraint.
   */
  EGN_STATUS_BAD_INPUT = 3,
  /**
   * The input was well formed but degenerate for the computation
   * (singular normalization, inconsistent or underdetermined systems).
   */
  EGN_STATUS_DEGENERATE = 4,
  /**
   * The parameter combination is outside the supported range.
   */
  EGN_STATUS_UNSUPPORTED = 5,
  /**
   * An internal invariant failed; the library state is still sound.
   */
  EGN_STATUS_INTERNAL = 6,
} EgnStatus;

/**
 * A pointed nodal curve datum: g node preimage pairs and g marked points.
 */
typedef struct EgnCurve EgnCurve;

/**
 * A dense matrix of exact rationals.
 */
typedef struct EgnMatrix EgnMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. The pointer
 * stays valid until the next failing call on the same thread; never free it.
 */
const char *egn_last_error(void);

/**
 * Static name of a status code, e.g. `"ok"` or `"bad_input"`.
 */
const char *egn_status_name(enum EgnStatus status);

/**
 * Frees a string returned by this library. Null is ignored.
 */
void egn_string_free(char *s);

/**
 * Builds a curve from three length-`g` arrays of rational strings
 * (`"p"` or `"p/q"`): first node preimages, second node preimages, marked
 * points. All 3g values must be pairwise distinct.
 */
enum EgnStatus egn_curve_new(size_t g,
                             const char *const *nodes_first,
                             const char *const *nodes_second,
                             const char *const *marked,
                             struct EgnCurve **out);

/**
 * Parses a curve from JSON of the shape
 * `{"nodes": [["p/q", "p/q"], ...], "marked": ["p/q", ...]}`.
 */
enum EgnStatus egn_curve_parse(const char *json, struct EgnCurve **out);

/**
 * Serializes the curve back to the JSON shape accepted by
 * [`egn_curve_parse`].
 */
enum EgnStatus egn_curve_to_json(const struct EgnCurve *curve, char **out);

/**
 * Frees a curve handle. Null is ignored.
 */
void egn_curve_free(struct EgnCurve *curve);

/**
 * Number of nodes of the curve; 0 for a null handle.
 */
size_t egn_curve_genus(const struct EgnCurve *curve);

/**
 * The g-by-g invariant matrix of the curve: off-diagonal entries are the
 * double-pole coupling constants, the diagonal is a solver byproduct.
 */
enum EgnStatus egn_curve_alpha(const struct EgnCurve *curve, struct EgnMatrix **out);

/**
 * Full expansion-constant table of the curve as JSON with fields
 * `alpha`, `beta`, `gamma`, `delta`, `epsilon`, `theta`, `gamma_diag`,
 * `a`, `b`.
 */
enum EgnStatus egn_curve_constants_json(const struct EgnCurve *curve, char **out);

/**
 * Rank of the deformation-direction functional matrix of the curve.
 */
enum EgnStatus egn_curve_tangent_rank(const struct EgnCurve *curve, size_t *out);

/**
 * Triple/quadruple Massey product report at the base point `point`
 * (`"inf"` or a rational string), as JSON with fields `h0_chain`,
 * `triple_vanishes`, `quadruple_defined`, `quadruple_vanishes`.
 */
enum EgnStatus egn_curve_massey_json(const struct EgnCurve *curve, const char *point, char **out);

/**
 * Closed-form invariant matrix of a wheel of lines with the given scale
 * parameters (rational strings; none may be 0 or 1).
 */
enum EgnStatus egn_wheel_alpha(const char *const *lambda, size_t len, struct EgnMatrix **out);

/**
 * Closed-form invariant matrix of a hyperelliptic curve: `branch` holds g
 * marked Weierstrass points, `poly` the defining polynomial coefficients
 * in increasing degree. Branch points must be distinct simple roots.
 */
enum EgnStatus egn_hyperelliptic_alpha(const char *const *branch,
                                       size_t branch_len,
                                       const char *const *poly,
                                       size_t poly_len,
                                       struct EgnMatrix **out);

/**
 * Dimension of the graded Hochschild cohomology of the arrow algebra with
 * parameters (g, n) in cohomological degree `level` and internal degree
 * `degree`. The resolution method covers the self-dual case n = g only.
 */
enum EgnStatus egn_hh_dimension(size_t g,
                                size_t n,
                                size_t level,
                                int64_t degree,
                                enum EgnHhMethod method,
                                size_t *out);

/**
 * Parses a matrix from a JSON array of rows of rational strings.
 */
enum EgnStatus egn_matrix_parse(const char *json, struct EgnMatrix **out);

/**
 * Serializes the matrix as a JSON array of rows of rational strings.
 */
enum EgnStatus egn_matrix_to_json(const struct EgnMatrix *matrix, char **out);

/**
 * Number of rows; 0 for a null handle.
 */
size_t egn_matrix_rows(const struct EgnMatrix *matrix);

/**
 * Number of columns; 0 for a null handle.
 */
size_t egn_matrix_cols(const struct EgnMatrix *matrix);

/**
 * Entry (i, j) as a `"p/q"` string.
 */
enum EgnStatus egn_matrix_entry(const struct EgnMatrix *matrix, size_t i, size_t j, char **out);

/**
 * Frees a matrix handle. Null is ignored.
 */
void egn_matrix_free(struct EgnMatrix *matrix);

/**
 * Recovers the full expansion-constant table from an invariant matrix, as
 * the same JSON shape as [`egn_curve_constants_json`]. Fails with
 * `degenerate` when the linear systems are underdetermined or inconsistent.
 */
enum EgnStatus egn_reconstruct_json(const struct EgnMatrix *alpha, char **out);

/**
 * Shapes of the two homogeneous reconstruction systems for an invariant
 * matrix, as JSON `{"ct_hom": {...}, "acd_hom": {...}}` with fields
 * `system_id`, `num_equations`, `num_unknowns`, `solution_dim`,
 * `trivial_dim`.
 */
enum EgnStatus egn_systems_json(const struct EgnMatrix *alpha, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EGN_CAPI_H */
