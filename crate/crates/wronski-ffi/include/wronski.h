#ifndef WRONSKI_H
#define WRONSKI_H

/* Generated from the wronski-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible entry point.
typedef enum WronskiStatus {
  // The call succeeded.
  WronskiStatus_Ok = 0,
  // A required pointer argument was null.
  WronskiStatus_NullArgument = 1,
  // An input string was not valid UTF-8.
  WronskiStatus_InvalidUtf8 = 2,
  // An input document did not match the expected JSON shape.
  WronskiStatus_ParseError = 3,
  // The computation itself reported an error.
  WronskiStatus_ComputeError = 4,
} WronskiStatus;

// Opaque handle around a parsed quasi-exponential space.
typedef struct WronskiSpace WronskiSpace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Returns the message recorded by the most recent failing call on this
// thread, or an empty string if nothing has failed yet.
//
// The pointer is owned by the library and must not be freed; the next
// failing call on the same thread invalidates it.
const char *wronski_last_error(void);

// Releases a string allocated by this library.
//
// # Safety
// `s` must be null or a pointer previously written through an `out`
// parameter of this library and not yet freed.
void wronski_string_free(char *s);

// Parses a quasi-exponential space from its JSON description: `{"mode":
// "multiplicative" | "exponent", "members": [{"base": [re, im], "poly":
// [[re, im], ...]}, ...]}`, the same document the `wronski wronskian`
// command reads. On success `*out` owns the new handle.
//
// # Safety
// `json` must point to a NUL-terminated string and `out` must be valid for
// a single pointer write.
enum WronskiStatus wronski_space_from_json(const char *json, struct WronskiSpace **out);

// Releases a space handle.
//
// # Safety
// `space` must be null or a handle from [`wronski_space_from_json`] that has
// not been freed yet.
void wronski_space_free(struct WronskiSpace *space);

// Number of member functions in the space, or zero for a null handle.
//
// # Safety
// `space` must be null or a live handle from [`wronski_space_from_json`].
size_t wronski_space_dimension(const struct WronskiSpace *space);

// Evaluates the discrete Wronskian with the given step and writes the
// factored result (`kappa`, `monic`, `prefactor`) as JSON to `*out`.
// Multiplicative-mode spaces require `step == 1`.
//
// # Safety
// `space` must be a live handle from [`wronski_space_from_json`] and `out`
// must be valid for a single pointer write.
enum WronskiStatus wronski_discrete_wronskian(const struct WronskiSpace *space,
                                              double step,
                                              char **out);

// Evaluates the differential Wronskian (exponent-mode spaces only) and
// writes the factored result as JSON to `*out`.
//
// # Safety
// `space` must be a live handle from [`wronski_space_from_json`] and `out`
// must be valid for a single pointer write.
enum WronskiStatus wronski_differential_wronskian(const struct WronskiSpace *space, char **out);

// Recovers all spaces with the prescribed group structure whose Wronskian
// has the target roots, writing the solution set as JSON to `*out`.
//
// `problem_json` has the shape `{"mode": ..., "targets": [[re, im], ...],
// "groups": [{"param": ..., "degrees": [...]}, ...]}`. `seed` drives the
// random starts, `tol` is the residual acceptance threshold, and `starts`
// bounds how many starts are attempted.
//
// # Safety
// `problem_json` must point to a NUL-terminated string and `out` must be
// valid for a single pointer write.
enum WronskiStatus wronski_solve_inverse(const char *problem_json,
                                         uint64_t seed,
                                         double tol,
                                         size_t starts,
                                         char **out);

// Builds the `sites`-fold tensor space with local dimension `local_dim`,
// evaluation points `z`, and deformation parameters `q`; checks the residue,
// commutation, and symmetry identities of its connection operators; and
// certifies the bilinear form. A negative `twist` selects the untwisted
// form, while `twist >= 0` selects the sign-corrected twist that splits the
// first `twist` sites from the rest. The combined report is written as JSON
// to `*out`.
//
// # Safety
// `z` must point to `z_len` readable doubles, `q` to `q_len` readable
// doubles, and `out` must be valid for a single pointer write.
enum WronskiStatus wronski_bethe_check(size_t local_dim,
                                       size_t sites,
                                       const double *z,
                                       size_t z_len,
                                       const double *q,
                                       size_t q_len,
                                       ptrdiff_t twist,
                                       char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WRONSKI_H */
