#ifndef SPA_FFI_H
#define SPA_FFI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SpaStatus {
  SPA_STATUS_OK = 0,
  SPA_STATUS_NULL_POINTER = 1,
  SPA_STATUS_INVALID_ARGUMENT = 2,
  SPA_STATUS_UNSUPPORTED_DIMENSION = 3,
  SPA_STATUS_DEGENERATE_GEOMETRY = 4,
  SPA_STATUS_PARSE_ERROR = 5,
  SPA_STATUS_IO_ERROR = 6,
  SPA_STATUS_PANIC = 7,
} SpaStatus;

typedef enum SpaProtocol {
  SPA_PROTOCOL_PUSH = 0,
  SPA_PROTOCOL_PUSH_PULL = 1,
} SpaProtocol;

/**
 * Opaque graph handle.
 */
typedef struct SpaHandle SpaHandle;

/**
 * Model parameters; `n` vertices in `[0,1)^m`.
 */
typedef struct SpaModelParams {
  size_t m;
  double a1;
  double a2;
  double p;
  size_t n;
  uint64_t seed;
} SpaModelParams;

typedef struct SpaRumourResult {
  size_t component_size;
  size_t informed;
  /**
   * Rounds to inform the source's component, -1 if the round cap hit first.
   */
  int64_t spread_time;
} SpaRumourResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *spa_last_error(void);

/**
 * Generate a graph. On success `*out` owns a new handle.
 *
 * # Safety
 * `params` and `out` must be valid pointers.
 */
enum SpaStatus spa_generate(const struct SpaModelParams *params, struct SpaHandle **out);

/**
 * Read an spa graph file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SpaStatus spa_read(const char *path, struct SpaHandle **out);

/**
 * Write an spa graph file.
 *
 * # Safety
 * `g` must come from this library; `path` must be NUL-terminated.
 */
enum SpaStatus spa_write(const struct SpaHandle *g, const char *path);

/**
 * Release a handle. NULL is ignored.
 *
 * # Safety
 * `g` must come from this library and not be used afterwards.
 */
void spa_free(struct SpaHandle *g);

/**
 * Vertex count, 0 for NULL.
 *
 * # Safety
 * `g` must be NULL or come from this library.
 */
size_t spa_num_vertices(const struct SpaHandle *g);

/**
 * Directed edge count, 0 for NULL.
 *
 * # Safety
 * `g` must be NULL or come from this library.
 */
size_t spa_num_edges(const struct SpaHandle *g);

/**
 * Copy up to `cap` edges as (child, parent, birth step) triples into
 * `buf` (3 entries per edge); `*written` receives the edge count copied.
 *
 * # Safety
 * `buf` must hold `3 * cap` values; `written` must be valid.
 */
enum SpaStatus spa_edges(const struct SpaHandle *g, uint32_t *buf, size_t cap, size_t *written);

/**
 * Share of vertices in a largest component of the undirected graph.
 *
 * # Safety
 * `g` must come from this library; `out` must be valid.
 */
enum SpaStatus spa_giant_fraction(const struct SpaHandle *g, double *out);

/**
 * Effective diameter over connected pairs. `num_pairs = 0` selects the
 * exact computation (small graphs only).
 *
 * # Safety
 * `g` must come from this library; `out` must be valid.
 */
enum SpaStatus spa_effective_diameter(const struct SpaHandle *g,
                                      double fraction,
                                      size_t num_pairs,
                                      uint64_t seed,
                                      uint32_t *out);

/**
 * Run a rumour protocol from `source`. `max_rounds = 0` keeps the default cap.
 *
 * # Safety
 * `g` must come from this library; `out` must be valid.
 */
enum SpaStatus spa_rumour(const struct SpaHandle *g,
                          enum SpaProtocol protocol,
                          uint32_t source,
                          uint64_t seed,
                          size_t max_rounds,
                          struct SpaRumourResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPA_FFI_H */
