#ifndef LUCAS_ATOMS_H
#define LUCAS_ATOMS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

#define LA_ROUTE_SYMMETRIC 0

#define LA_ROUTE_DIVISION 1

#define LA_ROUTE_REDUCTION 2

#define LA_ROUTE_CHECKED 3

#define LA_METHOD_CLOSED 0

#define LA_METHOD_MOBIUS 1

#define LA_METHOD_ORACLE 2

// Outcome of every `la_*` call.
typedef enum {
  LA_STATUS_OK = 0,
  // The input is outside the mathematical domain (for example a
  // composite modulus or a vanishing value).
  LA_STATUS_DOMAIN_ERROR = 1,
  // An enumeration code or string argument was not recognized.
  LA_STATUS_INVALID_ARGUMENT = 2,
  // Two independent computations disagreed; this is a library bug.
  LA_STATUS_INTERNAL_ERROR = 3,
  LA_STATUS_NULL_POINTER = 4,
  LA_STATUS_PANIC = 5,
} LaStatus;

// Opaque bivariate polynomial in `s` and `t`.
typedef struct LaPoly LaPoly;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Atom `P_n` by the given `LA_ROUTE_*`.
//
// # Safety
// `out` must be valid for a write.
LaStatus la_atom(uint64_t n, uint32_t route, LaPoly **out);

// Lucas polynomial `U_n`.
//
// # Safety
// `out` must be valid for a write.
LaStatus la_lucas_poly(uint64_t n, LaPoly **out);

// Companion polynomial `W_n`.
//
// # Safety
// `out` must be valid for a write.
LaStatus la_companion_poly(uint64_t n, LaPoly **out);

// # Safety
// `a` and `b` must be live handles; `out` must be valid for a write.
LaStatus la_poly_mul(const LaPoly *a, const LaPoly *b, LaPoly **out);

// Exact quotient `a / b`, with `b` monic in `s`.
//
// # Safety
// `a` and `b` must be live handles; `out` must be valid for a write.
LaStatus la_poly_exact_div_in_s(const LaPoly *a, const LaPoly *b, LaPoly **out);

// Canonical text, e.g. `s^4 + 4*s^2*t + 2*t^2`.
//
// # Safety
// `poly` must be a live handle; `out` must be valid for a write.
LaStatus la_poly_to_string(const LaPoly *poly, char **out);

// Value at `(s, t)` as a decimal string.
//
// # Safety
// `poly` must be a live handle; `out_decimal` must be valid for a write.
LaStatus la_poly_eval(const LaPoly *poly, int64_t s, int64_t t, char **out_decimal);

// Whether two polynomials are identical.
//
// # Safety
// `a` and `b` must be live handles; `out` must be valid for a write.
LaStatus la_poly_equal(const LaPoly *a, const LaPoly *b, bool *out);

// Releases a handle; null is ignored.
//
// # Safety
// `poly` must be null or a handle not yet freed.
void la_poly_free(LaPoly *poly);

// `v_p(P_n(s, t))` by the given `LA_METHOD_*`.
//
// # Safety
// `out` must be valid for a write.
LaStatus la_vp_atom(uint64_t p, int64_t s, int64_t t, uint64_t n, uint32_t method, uint64_t *out);

// Rank of appearance of `p` in `U(s, t)`. When `p` divides no term,
// `*out_defined` is false and `*out_rho` is 0.
//
// # Safety
// `out_rho` and `out_defined` must be valid for writes.
LaStatus la_rank_of_appearance(uint64_t p,
                               int64_t s,
                               int64_t t,
                               uint64_t *out_rho,
                               bool *out_defined);

// Runs the command-line interface in process. `argv[0]` is the program
// name. Captured output is returned through `out_stdout` and `out_stderr`
// and the CLI exit code through `out_exit`.
//
// # Safety
// `argv` must point to `argc` valid NUL-terminated strings; the out
// pointers must be valid for writes.
LaStatus la_run(uintptr_t argc,
                const char *const *argv,
                char **out_stdout,
                char **out_stderr,
                int32_t *out_exit);

// Description of the last failure on this thread, or null after a
// success. Valid until the next `la_*` call on the same thread.
const char *la_last_error(void);

// Releases a string returned by this library; null is ignored.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void la_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LUCAS_ATOMS_H */
