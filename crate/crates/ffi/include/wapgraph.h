#ifndef WAPGRAPH_H
#define WAPGRAPH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum WgStatus {
  WG_STATUS_OK = 0,
  WG_STATUS_NULL_POINTER = 1,
  WG_STATUS_INVALID_ARGUMENT = 2,
  WG_STATUS_INVALID_UTF8 = 3,
  WG_STATUS_GRAPH6 = 4,
  WG_STATUS_UNKNOWN_CLASS = 5,
  WG_STATUS_ORDER_BOUND = 6,
  WG_STATUS_PRECONDITION = 7,
  WG_STATUS_BOUND_EXCEEDED = 8,
  WG_STATUS_SCHEMA_VERSION = 9,
  WG_STATUS_IO = 10,
  WG_STATUS_INTERNAL = 11,
  WG_STATUS_PANIC = 12,
} WgStatus;

/**
 * Opaque class handle.
 */
typedef struct WgClass WgClass;

/**
 * Opaque graph handle.
 */
typedef struct WgGraph WgGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success. Valid until the
 * next call on this thread.
 */
const char *wg_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *wg_version(void);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void wg_string_free(char *s);

/**
 * Edgeless graph on `n` vertices.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum WgStatus wg_graph_new(size_t n, struct WgGraph **out_graph);

/**
 * # Safety
 * `s` must be a NUL-terminated string and `out` a valid pointer.
 */
enum WgStatus wg_graph_from_graph6(const char *s, struct WgGraph **out_graph);

/**
 * # Safety
 * `g` must be a live handle or null.
 */
void wg_graph_free(struct WgGraph *g);

/**
 * # Safety
 * `g` must be a live handle and `order` a valid pointer.
 */
enum WgStatus wg_graph_order(const struct WgGraph *g, size_t *order);

/**
 * # Safety
 * `g` must be a live handle.
 */
enum WgStatus wg_graph_add_edge(struct WgGraph *g, size_t u, size_t v);

/**
 * # Safety
 * `g` must be a live handle and `result` a valid pointer.
 */
enum WgStatus wg_graph_has_edge(const struct WgGraph *g, size_t u, size_t v, bool *result);

/**
 * graph6 encoding; release with [`wg_string_free`].
 *
 * # Safety
 * `g` must be a live handle and `result` a valid pointer.
 */
enum WgStatus wg_graph_to_graph6(const struct WgGraph *g, char **result);

/**
 * Parses a class identifier such as `c4free`, `windmill` or `cocycles:5`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum WgStatus wg_class_parse(const char *spec, struct WgClass **out_class);

/**
 * # Safety
 * `k` must be a live handle or null.
 */
void wg_class_free(struct WgClass *k);

/**
 * # Safety
 * Handles must be live and `result` a valid pointer.
 */
enum WgStatus wg_class_member(const struct WgClass *k, const struct WgGraph *g, bool *result);

/**
 * Searches for an amalgam of `left` and `right` over `base`, which both contain on their
 * first labels. On success `*amalgam` is a new handle, or null when no amalgam exists in the
 * class.
 *
 * # Safety
 * Handles must be live and `amalgam` a valid pointer.
 */
enum WgStatus wg_find_amalgam(const struct WgClass *k,
                              const struct WgGraph *base,
                              const struct WgGraph *left,
                              const struct WgGraph *right,
                              bool allow_cross_edges,
                              struct WgGraph **amalgam);

/**
 * The windmill witness for `base`.
 *
 * # Safety
 * `base` must be a live handle and `witness` a valid pointer.
 */
enum WgStatus wg_windmill_witness(const struct WgGraph *base, struct WgGraph **witness);

/**
 * The C4 gadget bundle for `witness` as certificate JSON; release with [`wg_string_free`].
 *
 * # Safety
 * `witness` must be a live handle and `json` a valid pointer.
 */
enum WgStatus wg_c4_gadget_json(const struct WgGraph *witness, char **json);

/**
 * Re-verifies a certificate bundle given as JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `ok` a valid pointer.
 */
enum WgStatus wg_replay_json(const char *json, bool *ok);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WAPGRAPH_H */
