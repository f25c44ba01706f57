#ifndef WATERSHED_H
#define WATERSHED_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

/*
 Status codes. Values 2 to 5 match the CLI exit codes.
 */
typedef enum WsStatus {
  WS_STATUS_OK = 0,
  WS_STATUS_PARSE = 2,
  WS_STATUS_DOMAIN = 3,
  WS_STATUS_INTERNAL_CONTRADICTION = 4,
  WS_STATUS_RESOURCE_LIMIT = 5,
  WS_STATUS_NULL_POINTER = 6,
  WS_STATUS_BUFFER_TOO_SMALL = 7,
  WS_STATUS_PANIC = 8,
} WsStatus;

/*
 Opaque canonical cycle-form permutation.
 */
typedef struct WsCyclePermutation WsCyclePermutation;

/*
 Opaque validated parameters `a_1..a_n`, `b_1..b_n`, `q`.
 */
typedef struct WsHikitaParams WsHikitaParams;

/*
 Opaque list of exact rationals.
 */
typedef struct WsRationalVec WsRationalVec;

/*
 Opaque seeded sampler for the weighted process over {1..2n}.
 */
typedef struct WsSampler WsSampler;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the most recent failure on this thread, or NULL. Borrowed;
 valid until the next failing call on the same thread.
 */
const char *ws_last_error(void);

/*
 Frees a string returned by this library. NULL is ignored.
 */
void ws_string_free(char *s);

/*
 Watershed by the run-collapse algorithm.
 */
enum WsStatus ws_watershed(const int64_t *data, size_t len, size_t *out_k);

/*
 Watershed by direct search over every split.
 */
enum WsStatus ws_watershed_brute(const int64_t *data, size_t len, size_t *out_k);

/*
 JSON trace of the run-collapse algorithm; free with `ws_string_free`.
 */
enum WsStatus ws_watershed_trace_json(const int64_t *data, size_t len, char **out);

/*
 `((2n-1)!!)^2` as a decimal string; free with `ws_string_free`.
 */
enum WsStatus ws_all_even_count(uint64_t n, char **out);

/*
 Number of orderings of {1..2n} with watershed k, as a decimal string.
 */
enum WsStatus ws_watershed_count(uint64_t n, uint64_t k, char **out);

/*
 Builds a permutation from `n_cycles` cycles laid out back to back in
 `elements`, with `cycle_lens[i]` entries in cycle `i`. Any rotation is accepted.
 */
enum WsStatus ws_cycle_permutation_new(const int64_t *elements,
                                       const size_t *cycle_lens,
                                       size_t n_cycles,
                                       struct WsCyclePermutation **out);

/*
 Inverse Foata map of an ordering.
 */
enum WsStatus ws_foata_inverse(const int64_t *data, size_t len, struct WsCyclePermutation **out);

void ws_cycle_permutation_free(struct WsCyclePermutation *perm);

/*
 Number of cycles; 0 for NULL.
 */
size_t ws_cycle_count(const struct WsCyclePermutation *perm);

/*
 Copies cycle `index` (canonical order) into `buf`. `out_len` always
 receives the cycle length; `BufferTooSmall` if `capacity` is short.
 */
enum WsStatus ws_cycle_get(const struct WsCyclePermutation *perm,
                           size_t index,
                           int64_t *buf,
                           size_t capacity,
                           size_t *out_len);

/*
 Foata map: writes the ordering into `buf`.
 */
enum WsStatus ws_foata(const struct WsCyclePermutation *perm,
                       int64_t *buf,
                       size_t capacity,
                       size_t *out_len);

enum WsStatus ws_hikita_params_new(const uint64_t *a,
                                   const uint64_t *b,
                                   size_t n,
                                   const char *q,
                                   struct WsHikitaParams **out);

void ws_hikita_params_free(struct WsHikitaParams *params);

/*
 `phi_k` as a `"p/q"` string; free with `ws_string_free`.
 */
enum WsStatus ws_hikita_phi(const struct WsHikitaParams *params, size_t k, char **out);

/*
 `[phi_0, ..., phi_n]`, checked to sum to exactly 1.
 */
enum WsStatus ws_hikita_distribution(const struct WsHikitaParams *params,
                                     struct WsRationalVec **out);

/*
 The sampling weights `w_1..w_2n` for these parameters.
 */
enum WsStatus ws_weights_from_params(const struct WsHikitaParams *params,
                                     struct WsRationalVec **out);

size_t ws_rational_vec_len(const struct WsRationalVec *v);

/*
 Borrowed `"p/q"` string at `index`, or NULL when out of range.
 */
const char *ws_rational_vec_get(const struct WsRationalVec *v, size_t index);

void ws_rational_vec_free(struct WsRationalVec *v);

enum WsStatus ws_sampler_new(const struct WsHikitaParams *params,
                             uint64_t seed,
                             struct WsSampler **out);

/*
 Draws the next ordering of {1..2n} into `buf` (capacity at least 2n).
 */
enum WsStatus ws_sampler_next(struct WsSampler *sampler,
                              int64_t *buf,
                              size_t capacity,
                              size_t *out_len);

void ws_sampler_free(struct WsSampler *sampler);

/*
 Monte Carlo watershed report as JSON; free with `ws_string_free`.
 */
enum WsStatus ws_monte_carlo_json(const struct WsHikitaParams *params,
                                  uint64_t sample_size,
                                  uint64_t seed,
                                  char **out);

/*
 The unique unsweepable town (1-based) of the line built from an
 even-length sequence `r_1, l_2, r_2, ..., l_n`.
 */
enum WsStatus ws_bulldozer_unsweepable(const int64_t *data, size_t len, size_t *out_town);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WATERSHED_H */
