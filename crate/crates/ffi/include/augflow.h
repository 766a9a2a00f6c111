#ifndef AUGFLOW_H
#define AUGFLOW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AfStatus {
  AF_STATUS_OK = 0,
  AF_STATUS_NULL_POINTER = 1,
  /**
   * Malformed input: bad network, bad text, out-of-range values.
   */
  AF_STATUS_INVALID_INPUT = 2,
  /**
   * Well-formed input that breaks a solver contract, such as guided
   * search without scores or scores of the wrong length.
   */
  AF_STATUS_CONTRACT = 3,
  AF_STATUS_PANIC = 4,
} AfStatus;

typedef enum AfStrategy {
  AF_STRATEGY_DFS = 0,
  AF_STRATEGY_BFS = 1,
  AF_STRATEGY_ADJUSTED_BFS = 2,
  AF_STRATEGY_GUIDED = 3,
} AfStrategy;

typedef struct AfNetwork AfNetwork;

typedef struct AfScores AfScores;

typedef struct AfSolution AfSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *af_last_error(void);

/**
 * Builds a network from parallel edge arrays of length `edge_count`.
 *
 * # Safety
 * Each array must hold `edge_count` elements; `out` must be writable.
 */
enum AfStatus af_network_new(size_t vertex_count,
                             const size_t *tails,
                             const size_t *heads,
                             const int64_t *capacities,
                             size_t edge_count,
                             size_t source,
                             size_t sink,
                             struct AfNetwork **out);

/**
 * Parses the plain-text network format (`n m s t` then `u v cap` lines).
 *
 * # Safety
 * `text` must be a nul-terminated string; `out` must be writable.
 */
enum AfStatus af_network_parse(const char *text, struct AfNetwork **out);

/**
 * # Safety
 * `net` must come from this library and not be freed twice. Null is ignored.
 */
void af_network_free(struct AfNetwork *net);

/**
 * # Safety
 * `net` must be a live handle or null.
 */
size_t af_network_vertex_count(const struct AfNetwork *net);

/**
 * # Safety
 * `net` must be a live handle or null.
 */
size_t af_network_edge_count(const struct AfNetwork *net);

/**
 * Wraps `len` per-edge scores, each in `[0, 1]`.
 *
 * # Safety
 * `values` must hold `len` elements; `out` must be writable.
 */
enum AfStatus af_scores_new(const double *values, size_t len, struct AfScores **out);

/**
 * Exact scores derived from the network's own minimum cut.
 *
 * # Safety
 * `net` must be a live handle; `out` must be writable.
 */
enum AfStatus af_scores_oracle(const struct AfNetwork *net, struct AfScores **out);

/**
 * # Safety
 * `scores` must come from this library and not be freed twice. Null is ignored.
 */
void af_scores_free(struct AfScores *scores);

/**
 * Solves max flow. `strategy` is an `AfStrategy` value; `scores` may be
 * null unless it is guided.
 * `warm_start` may be null for a cold start; otherwise it holds one
 * predicted flow per edge, which is clipped and repaired before solving.
 *
 * # Safety
 * Handles must be live or null as documented; `warm_start` must hold
 * `warm_len` elements; `out` must be writable.
 */
enum AfStatus af_solve(const struct AfNetwork *net,
                       uint32_t strategy,
                       const struct AfScores *scores,
                       const double *warm_start,
                       size_t warm_len,
                       struct AfSolution **out);

/**
 * # Safety
 * `sol` must come from this library and not be freed twice. Null is ignored.
 */
void af_solution_free(struct AfSolution *sol);

/**
 * # Safety
 * `sol` must be a live handle or null.
 */
int64_t af_solution_value(const struct AfSolution *sol);

/**
 * # Safety
 * `sol` must be a live handle or null.
 */
size_t af_solution_augmentations(const struct AfSolution *sol);

/**
 * # Safety
 * `sol` must be a live handle or null.
 */
size_t af_solution_repair_iterations(const struct AfSolution *sol);

/**
 * Number of edges crossing the minimum cut.
 *
 * # Safety
 * `sol` must be a live handle or null.
 */
size_t af_solution_cut_size(const struct AfSolution *sol);

/**
 * Copies the per-edge flow into `buf`, which must have room for every edge.
 *
 * # Safety
 * `sol` must be a live handle; `buf` must hold `len` elements.
 */
enum AfStatus af_solution_flow(const struct AfSolution *sol, int64_t *buf, size_t len);

/**
 * Copies the ids of the cut edges, ascending, into `buf`.
 *
 * # Safety
 * `sol` must be a live handle; `buf` must hold `len` elements.
 */
enum AfStatus af_solution_cut_edges(const struct AfSolution *sol, size_t *buf, size_t len);

/**
 * Writes 1 for each vertex on the source side of the cut and 0 otherwise.
 *
 * # Safety
 * `sol` must be a live handle; `buf` must hold `len` elements.
 */
enum AfStatus af_solution_source_side(const struct AfSolution *sol, uint8_t *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AUGFLOW_H */
