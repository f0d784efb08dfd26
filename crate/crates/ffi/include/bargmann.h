#ifndef BARGMANN_H
#define BARGMANN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of an FFI call.
 */
typedef enum BgStatus {
  BG_STATUS_OK = 0,
  BG_STATUS_NULL_POINTER = 1,
  BG_STATUS_INVALID_ARGUMENT = 2,
  BG_STATUS_INVALID_STATE = 3,
  BG_STATUS_LAYOUT_MISMATCH = 4,
  BG_STATUS_CAPACITY = 5,
  BG_STATUS_TRUNCATION = 6,
  BG_STATUS_UNDEFINED = 7,
  BG_STATUS_NOT_CONVERGED = 8,
  BG_STATUS_NUMERICAL = 9,
  BG_STATUS_JSON = 10,
  BG_STATUS_PANIC = 11,
} BgStatus;

/*
 Opaque protocol result handle.
 */
typedef struct BgEstimate BgEstimate;

/*
 Opaque state handle (a pure state or mixture of one system).
 */
typedef struct BgState BgState;

/*
 Estimation mode. `sampled == 0` selects the exact outcome distribution and
 ignores the other fields; `delta_fail` of 0 means the default 0.05.
 */
typedef struct BgMode {
  uint32_t sampled;
  uint64_t shots;
  uint64_t seed;
  uint64_t stream;
  double delta_fail;
} BgMode;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or null. Valid until the
 next failing call on the same thread.
 */
const char *bg_last_error(void);

/*
 Exact-mode settings.
 */
struct BgMode bg_mode_exact(void);

/*
 Sampled-mode settings with `shots` draws from `seed`.
 */
struct BgMode bg_mode_sampled(uint64_t shots, uint64_t seed);

/*
 Cap on Fock sector sizes for subsequent calls in this process.
 */
void bg_set_sector_cap(uint64_t cap);

/*
 Single photon spread over `d` internal modes with amplitudes `re + i·im`
 (normalized on construction).

 # Safety
 `re` and `im` point to `d` doubles; `out` is writable.
 */
enum BgStatus bg_state_single_photon(const double *re,
                                     const double *im,
                                     size_t d,
                                     struct BgState **out);

/*
 Dual-rail qubit `cos(θ/2)|1,0⟩ + e^{iφ} sin(θ/2)|0,1⟩`.

 # Safety
 `out` is writable.
 */
enum BgStatus bg_state_dual_rail(double theta, double phi, struct BgState **out);

/*
 Fock state with `occupations[α]` photons in internal mode `α`.

 # Safety
 `occupations` points to `d` values; `out` is writable.
 */
enum BgStatus bg_state_fock(const uint32_t *occupations, size_t d, struct BgState **out);

/*
 Coherent state truncated at `cutoff` total photons. Fails with
 `Truncation` if more than `max_tail` probability mass is discarded.

 # Safety
 `re` and `im` point to `d` doubles; `out` is writable.
 */
enum BgStatus bg_state_coherent(const double *re,
                                const double *im,
                                size_t d,
                                size_t cutoff,
                                double max_tail,
                                struct BgState **out);

/*
 Parse a pure state (`{"layout", "amplitudes"}`) or mixture
 (`{"components"}`) document.

 # Safety
 `json` is a NUL-terminated string; `out` is writable.
 */
enum BgStatus bg_state_from_json(const char *json, struct BgState **out);

/*
 Mixture `Σ weights[i] · states[i]`; every component of a mixed input is
 carried over with its weight scaled.

 # Safety
 `states` points to `n` live handles and `weights` to `n` doubles; `out` is
 writable.
 */
enum BgStatus bg_state_mixture(const struct BgState *const *states,
                               const double *weights,
                               size_t n,
                               struct BgState **out);

/*
 Number of internal modes `d` of a state, or 0 for a null handle.

 # Safety
 `state` is null or live.
 */
size_t bg_state_num_internal(const struct BgState *state);

/*
 Serialize a state as JSON.

 # Safety
 `state` is live; `out` is writable.
 */
enum BgStatus bg_state_to_json(const struct BgState *state, char **out);

/*
 # Safety
 `state` is null or a handle from this library not yet freed.
 */
void bg_state_free(struct BgState *state);

/*
 Estimate `tr(ρ_1 ρ_2 … ρ_n)` by Fourier interferometry.

 # Safety
 `states` points to `n` live handles; `out` is writable.
 */
enum BgStatus bg_estimate_trace(const struct BgState *const *states,
                                size_t n,
                                struct BgMode mode,
                                struct BgEstimate **out);

/*
 The trace estimate `X_1`.

 # Safety
 `estimate` is live; `re` and `im` are writable.
 */
enum BgStatus bg_estimate_delta(const struct BgEstimate *estimate, double *re, double *im);

/*
 Number of interfering systems `M`, or 0 for a null handle.

 # Safety
 `estimate` is null or live.
 */
size_t bg_estimate_num_systems(const struct BgEstimate *estimate);

/*
 Cyclic expectation `X_k`, `0 ≤ k < M`.

 # Safety
 `estimate` is live; `re` and `im` are writable.
 */
enum BgStatus bg_estimate_x(const struct BgEstimate *estimate, size_t k, double *re, double *im);

/*
 Copy the binned probabilities `P_0 … P_{M−1}` into `out[0..len]`.

 # Safety
 `estimate` is live; `out` has room for `len` doubles.
 */
enum BgStatus bg_estimate_binned(const struct BgEstimate *estimate, double *out, size_t len);

/*
 Hoeffding precision of each `P_j` (0 in exact mode).

 # Safety
 `estimate` is live; `out` is writable.
 */
enum BgStatus bg_estimate_epsilon(const struct BgEstimate *estimate, double *out);

/*
 Serialize an estimate as JSON.

 # Safety
 `estimate` is live; `out` is writable.
 */
enum BgStatus bg_estimate_to_json(const struct BgEstimate *estimate, char **out);

/*
 # Safety
 `estimate` is null or a handle from this library not yet freed.
 */
void bg_estimate_free(struct BgEstimate *estimate);

/*
 # Safety
 `s` is null or a string returned by this library not yet freed.
 */
void bg_string_free(char *s);

/*
 `tr(ρ_1 ρ_2 … ρ_n)` computed directly from inner products.

 # Safety
 `states` points to `n` live handles; `re` and `im` are writable.
 */
enum BgStatus bg_oracle_trace(const struct BgState *const *states,
                              size_t n,
                              double *re,
                              double *im);

/*
 Shots needed for precision `epsilon` on every binned probability with
 failure probability `delta`.

 # Safety
 `out` is writable.
 */
enum BgStatus bg_sample_count(double epsilon, double delta, uint64_t *out);

/*
 Overlap `tr(ρ_1 ρ_2)` from two-state interference, `2·P_0 − 1`.

 # Safety
 `a` and `b` are live; `out` is writable.
 */
enum BgStatus bg_hom_overlap(const struct BgState *a,
                             const struct BgState *b,
                             struct BgMode mode,
                             double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BARGMANN_H */
