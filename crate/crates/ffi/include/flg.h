#ifndef FLG_H
#define FLG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every fallible call.
 */
typedef enum FlgStatus {
  FLG_STATUS_OK = 0,
  /*
   The question asked has answer "no" (not an FL graph, no preimage).
   */
  FLG_STATUS_NO = 1,
  FLG_STATUS_NULL_ARGUMENT = 2,
  FLG_STATUS_INVALID_ARGUMENT = 3,
  FLG_STATUS_PARSE = 4,
  FLG_STATUS_TRIANGLE = 5,
  FLG_STATUS_BUDGET_EXHAUSTED = 6,
  FLG_STATUS_BUFFER_TOO_SMALL = 7,
  FLG_STATUS_INTERNAL = 8,
  FLG_STATUS_PANIC = 9,
} FlgStatus;

/*
 Digraph handle.
 */
typedef struct FlgDigraph FlgDigraph;

/*
 Undirected graph handle.
 */
typedef struct FlgGraph FlgGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failure on this thread. Valid until the next call
 into the library from the same thread.
 */
const char *flg_last_error(void);

/*
 Frees a string returned by the library.

 # Safety
 `s` must come from a `*_to_text` call, or be null.
 */
void flg_string_free(char *s);

/*
 Empty graph on `n` nodes.

 # Safety
 `out` must be valid for writes.
 */
enum FlgStatus flg_graph_new(size_t n, struct FlgGraph **out);

/*
 Parses the `p ugr` text format.

 # Safety
 `text` must be a NUL-terminated string and `out` valid for writes.
 */
enum FlgStatus flg_graph_parse(const char *text, struct FlgGraph **out);

/*
 # Safety
 `g` must come from this library and not be used afterwards; null is a no-op.
 */
void flg_graph_free(struct FlgGraph *g);

/*
 # Safety
 `g` must be a live graph handle.
 */
enum FlgStatus flg_graph_add_edge(struct FlgGraph *g, size_t u, size_t v);

/*
 # Safety
 `g` must be a live graph handle or null (returns 0).
 */
size_t flg_graph_node_count(const struct FlgGraph *g);

/*
 # Safety
 `g` must be a live graph handle or null (returns 0).
 */
size_t flg_graph_edge_count(const struct FlgGraph *g);

/*
 # Safety
 `g` must be a live graph handle.
 */
bool flg_graph_has_edge(const struct FlgGraph *g, size_t u, size_t v);

/*
 Serializes to the `p ugr` format; free the result with [`flg_string_free`].

 # Safety
 `g` must be a live graph handle and `out` valid for writes.
 */
enum FlgStatus flg_graph_to_text(const struct FlgGraph *g, char **out);

/*
 Empty digraph on `n` nodes.

 # Safety
 `out` must be valid for writes.
 */
enum FlgStatus flg_digraph_new(size_t n, struct FlgDigraph **out);

/*
 Parses the `p dgr` text format.

 # Safety
 `text` must be a NUL-terminated string and `out` valid for writes.
 */
enum FlgStatus flg_digraph_parse(const char *text, struct FlgDigraph **out);

/*
 # Safety
 `d` must come from this library and not be used afterwards; null is a no-op.
 */
void flg_digraph_free(struct FlgDigraph *d);

/*
 Appends an arc; its index is written to `index` when non-null.

 # Safety
 `d` must be a live digraph handle; `index` null or valid for writes.
 */
enum FlgStatus flg_digraph_add_arc(struct FlgDigraph *d, size_t tail, size_t head, size_t *index);

/*
 # Safety
 `d` must be a live digraph handle or null (returns 0).
 */
size_t flg_digraph_node_count(const struct FlgDigraph *d);

/*
 # Safety
 `d` must be a live digraph handle or null (returns 0).
 */
size_t flg_digraph_arc_count(const struct FlgDigraph *d);

/*
 # Safety
 `d` must be a live digraph handle; `tail` and `head` valid for writes.
 */
enum FlgStatus flg_digraph_arc(const struct FlgDigraph *d, size_t arc, size_t *tail, size_t *head);

/*
 Serializes to the `p dgr` format; free the result with [`flg_string_free`].

 # Safety
 `d` must be a live digraph handle and `out` valid for writes.
 */
enum FlgStatus flg_digraph_to_text(const struct FlgDigraph *d, char **out);

/*
 Intersection graph; node `i` of the result is arc `i` of `d`.

 # Safety
 `d` must be a live digraph handle and `out` valid for writes.
 */
enum FlgStatus flg_intersection_graph(const struct FlgDigraph *d, struct FlgGraph **out);

/*
 Recognizes a triangle-free FL graph. On [`FlgStatus::Ok`] `*out` holds a
 preimage whose arc `i` is node `i` of `g`; [`FlgStatus::No`] means `g` is
 not an FL graph and `*out` is left untouched.

 # Safety
 `g` must be a live graph handle and `out` valid for writes.
 */
enum FlgStatus flg_recognize(const struct FlgGraph *g, struct FlgDigraph **out);

/*
 Exhaustive preimage test for any small graph, bounded by `max_steps`.

 # Safety
 `g` must be a live graph handle.
 */
enum FlgStatus flg_has_preimage(const struct FlgGraph *g, uint64_t max_steps);

/*
 Colours a triangle-free FL graph with at most three colours. `colors`
 must hold `flg_graph_node_count(g)` entries; the number of colours used is
 written to `count` when non-null.

 # Safety
 `g` must be a live graph handle; `colors` valid for `len` writes.
 */
enum FlgStatus flg_color(const struct FlgGraph *g, size_t *colors, size_t len, size_t *count);

/*
 Maximum weight stable set. `in_set` gets 1 for chosen nodes and 0
 otherwise; the weight is written as `num / den`.

 # Safety
 `g` must be a live graph handle; `in_set` valid for `len` writes;
 `num` and `den` valid for writes.
 */
enum FlgStatus flg_max_stable_set(const struct FlgGraph *g,
                                  uint8_t *in_set,
                                  size_t len,
                                  int64_t *num,
                                  int64_t *den);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLG_H */
