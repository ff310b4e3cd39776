#ifndef BRANESCOPE_H
#define BRANESCOPE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes returned by every fallible function.
 */
typedef enum BsStatus {
  BS_STATUS_OK = 0,
  BS_STATUS_NULL_POINTER = 1,
  BS_STATUS_INVALID_INPUT = 2,
  BS_STATUS_NON_REFLEXIVE = 3,
  BS_STATUS_DOMAIN = 4,
  BS_STATUS_GENERICITY_FAILURE = 5,
  BS_STATUS_NUMERIC = 6,
  BS_STATUS_PANIC = 7,
} BsStatus;

/*
 A generic anticanonical hypersurface in the toric variety of a reflexive
 polytope.
 */
typedef struct BsHypersurface BsHypersurface;

/*
 A lattice polytope.
 */
typedef struct BsPolytope BsPolytope;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the most recent failure on this thread, or NULL. The pointer
 stays valid until the next call into this library on the same thread.
 */
const char *bs_last_error(void);

/*
 Parse a polytope document `{"name", "dim", "vertices"}`.

 # Safety
 `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum BsStatus bs_polytope_from_json(const char *json, struct BsPolytope **out);

/*
 Convex hull of `count` points of dimension `dim`, stored row-major.

 # Safety
 `coords` must point to `count * dim` integers and `out` must be valid.
 */
enum BsStatus bs_polytope_from_vertices(const int64_t *coords,
                                        size_t count,
                                        size_t dim,
                                        struct BsPolytope **out);

/*
 # Safety
 `p` must be NULL or a handle from this library that has not been freed.
 */
void bs_polytope_free(struct BsPolytope *p);

/*
 # Safety
 `p` must be a live handle.
 */
size_t bs_polytope_dim(const struct BsPolytope *p);

/*
 # Safety
 `p` must be a live handle and `out` a valid pointer.
 */
enum BsStatus bs_polytope_is_reflexive(const struct BsPolytope *p, bool *out);

/*
 # Safety
 `p` must be a live handle and `out` a valid pointer.
 */
enum BsStatus bs_polytope_lattice_point_count(const struct BsPolytope *p, size_t *out);

/*
 Generic anticanonical hypersurface with coefficients drawn from `seed`.
 The polytope handle may be freed afterwards.

 # Safety
 `p` must be a live handle and `out` a valid pointer.
 */
enum BsStatus bs_hypersurface_new(const struct BsPolytope *p,
                                  uint64_t seed,
                                  struct BsHypersurface **out);

/*
 # Safety
 `h` must be NULL or a handle from this library that has not been freed.
 */
void bs_hypersurface_free(struct BsHypersurface *h);

/*
 Number of torus-invariant prime divisors, i.e. the divisor length.

 # Safety
 `h` must be a live handle.
 */
size_t bs_hypersurface_ray_count(const struct BsHypersurface *h);

/*
 Dimension of the hypersurface, which is one less than the ambient one.

 # Safety
 `h` must be a live handle.
 */
size_t bs_hypersurface_dim(const struct BsHypersurface *h);

/*
 Writes `h^q(Y, O_Y(E))` for `q = 0 .. out_len - 1`. `out_len` must equal
 `bs_hypersurface_dim(h) + 1`.

 # Safety
 `divisor` must point to `len` integers and `out` to `out_len` slots.
 */
enum BsStatus bs_hypersurface_cohomology(const struct BsHypersurface *h,
                                         const int64_t *divisor,
                                         size_t len,
                                         size_t *out,
                                         size_t out_len);

/*
 Ext table between two branes as JSON. Branes use the textual form
 `a1,...,ar@shift;...`. The returned string must be released with
 `bs_string_free`.

 # Safety
 `a` and `b` must be NUL-terminated strings and `out` a valid pointer.
 */
enum BsStatus bs_hypersurface_ext_json(const struct BsHypersurface *h,
                                       const char *a,
                                       const char *b,
                                       char **out);

/*
 # Safety
 `s` must be NULL or a string returned by this library.
 */
void bs_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BRANESCOPE_H */
