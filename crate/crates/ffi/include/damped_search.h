#ifndef DAMPED_SEARCH_H
#define DAMPED_SEARCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  DGS_STATUS_OK = 0,
  DGS_STATUS_NULL_POINTER = 1,
  DGS_STATUS_INVALID_ARGUMENT = 2,
  DGS_STATUS_NO_BRACKET = 3,
  DGS_STATUS_NOT_CONVERGED = 4,
  DGS_STATUS_INVARIANT_VIOLATION = 5,
  DGS_STATUS_PANIC = 6,
} DgsStatus;

// State vector of the item register plus ancilla.
typedef struct DgsFullState DgsFullState;

// Search space of `n` items with `m` targets.
typedef struct DgsSpace DgsSpace;

// Reduced state `(Tr ρX, Tr ρZ, Tr ρ)`.
typedef struct {
  double x;
  double z;
  double t;
} DgsBloch;

typedef struct {
  double re;
  double im;
} DgsComplex;

// Expected oracle calls. `best_r` and `horizon` are -1 when absent and
// `verification_success` is NaN when no verification call is made.
typedef struct {
  double expected_calls;
  int64_t best_r;
  double flip_mass;
  double survival;
  double verification_success;
  double tail;
  int64_t horizon;
} DgsCost;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *dgs_version(void);

// Message for the last failure on this thread, or NULL if there was none.
// The pointer stays valid until the next failing call on the same thread.
const char *dgs_last_error_message(void);

// # Safety
// `out` must be valid for writing one pointer.
DgsStatus dgs_space_new(uint64_t n, uint64_t m, DgsSpace **out);

// # Safety
// `space` must be NULL or a handle from [`dgs_space_new`] not yet freed.
void dgs_space_free(DgsSpace *space);

// # Safety
// `space` must be a live handle and `out` valid for one `double`.
DgsStatus dgs_space_theta(const DgsSpace *space, double *out);

// # Safety
// `space` must be a live handle and `out` valid for one `DgsBloch`.
DgsStatus dgs_initial_state(const DgsSpace *space, DgsBloch *out);

// Writes the 3×3 damped map row-major into `out[0..9]`.
//
// # Safety
// `out` must be valid for nine `double`s.
DgsStatus dgs_damped_map(double theta, double phi, double *out);

// One damped iteration in Kraus form; `flip` receives the flip probability.
//
// # Safety
// `state` must be readable, `out` and `flip` writable.
DgsStatus dgs_kraus_step(const DgsBloch *state,
                         double theta,
                         double phi,
                         DgsBloch *out,
                         double *flip);

// States after `0..=steps` iterations into `out[0..=steps]`. `phis` holds a
// single angle or at least `steps` angles.
//
// # Safety
// `phis` must be readable for `phis_len` values and `out` writable for
// `out_len` values.
DgsStatus dgs_trajectory(const DgsSpace *space,
                         const double *phis,
                         size_t phis_len,
                         size_t steps,
                         DgsBloch *out,
                         size_t out_len);

// The three eigenvalues of the damped map, ordered by descending real part.
//
// # Safety
// `out` must be writable for three `DgsComplex`.
DgsStatus dgs_eigenvalues(double theta, double phi, DgsComplex *out);

// # Safety
// `out` must be writable.
DgsStatus dgs_critical_phi_closed(double theta, double *out);

// # Safety
// `out` must be writable.
DgsStatus dgs_critical_phi_numeric(double theta, double *out);

// # Safety
// `space` must be a live handle and `out` writable.
DgsStatus dgs_undamped_expected_calls(const DgsSpace *space, DgsCost *out);

// # Safety
// `space` must be a live handle and `out` writable.
DgsStatus dgs_damped_expected_calls_fixed(const DgsSpace *space, double phi, DgsCost *out);

// Expected calls under the decreasing damping schedule, truncated once the
// unflipped probability reaches `eps`.
//
// # Safety
// `space` must be a live handle and `out` writable.
DgsStatus dgs_schedule_expected_calls(const DgsSpace *space, double eps, DgsCost *out);

// Damping angle of iteration `n` (1-based) of the decreasing schedule.
//
// # Safety
// `out` must be writable.
DgsStatus dgs_schedule_phi(uint64_t n, double *out);

// Uniform superposition over `n` items with the listed (zero-based) targets.
//
// # Safety
// `targets` must be readable for `targets_len` values and `out` writable.
DgsStatus dgs_fullstate_new(size_t n,
                            const size_t *targets,
                            size_t targets_len,
                            DgsFullState **out);

// Uniform superposition with `m` targets placed from `seed`.
//
// # Safety
// `out` must be writable.
DgsStatus dgs_fullstate_new_random(size_t n, size_t m, uint64_t seed, DgsFullState **out);

// # Safety
// `state` must be NULL or a handle from a `dgs_fullstate_new*` call not yet
// freed.
void dgs_fullstate_free(DgsFullState *state);

// # Safety
// `state` must be a live handle.
DgsStatus dgs_fullstate_apply_u(DgsFullState *state, double phi);

// # Safety
// `state` must be a live handle.
DgsStatus dgs_fullstate_apply_u_factored(DgsFullState *state, double phi);

// Measures the ancilla, keeping the unflipped branch; `flip` receives the
// flip probability relative to the incoming norm.
//
// # Safety
// `state` must be a live handle and `flip` writable.
DgsStatus dgs_fullstate_measure(DgsFullState *state, double *flip);

// # Safety
// `state` must be a live handle and `out` writable.
DgsStatus dgs_fullstate_reduced(const DgsFullState *state, DgsBloch *out);

// Whether every ancilla-up amplitude lies on a target item.
//
// # Safety
// `state` must be a live handle and `out` writable.
DgsStatus dgs_fullstate_flip_certain(const DgsFullState *state, bool *out);

// Continuous-time evolution sampled every `dt` up to `total_time`.
//
// `written` always receives the number of samples the run produces; if
// `out_len` is smaller nothing is written to `out` and the call fails with
// `DGS_STATUS_INVALID_ARGUMENT`, so a first call with `out_len = 0` sizes
// the buffer. Sample `k` is at time `min(k·dt, total_time)`.
//
// # Safety
// `state0` must be readable, `out` writable for `out_len` values and
// `written` writable.
DgsStatus dgs_lindblad_integrate(const DgsBloch *state0,
                                 double c,
                                 double total_time,
                                 double dt,
                                 DgsBloch *out,
                                 size_t out_len,
                                 size_t *written);

// Exact continuous-time evolution `exp(time·A)·state0`.
//
// # Safety
// `state0` must be readable and `out` writable.
DgsStatus dgs_lindblad_propagate(const DgsBloch *state0, double c, double time, DgsBloch *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DAMPED_SEARCH_H */
