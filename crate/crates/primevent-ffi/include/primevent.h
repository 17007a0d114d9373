#ifndef PRIMEVENT_H
#define PRIMEVENT_H

/* Generated by cbindgen from the primevent-ffi crate; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef struct PvConfig PvConfig;
typedef struct PvEvents PvEvents;

/**
 * Status code returned by every fallible call.
 */
typedef enum PvStatus {
  /**
   * The call succeeded.
   */
  PV_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  PV_STATUS_NULL_POINTER = 1,
  /**
   * An argument was malformed or out of range; see `pv_last_error`.
   */
  PV_STATUS_INVALID_ARGUMENT = 2,
  /**
   * An input file could not be read or parsed; see `pv_last_error`.
   */
  PV_STATUS_PARSE_FAILED = 3,
  /**
   * The analysis itself failed; see `pv_last_error`.
   */
  PV_STATUS_RUN_FAILED = 4,
  /**
   * An event index was past `pv_events_len`.
   */
  PV_STATUS_INDEX_OUT_OF_RANGE = 5,
} PvStatus;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message of the calling thread's most recent failure, empty if
 * none. Library-owned; valid until the thread's next failing call.
 */
const char *pv_last_error(void);

/**
 * The library version as a static string. Never freed by the caller.
 */
const char *pv_version(void);

/**
 * Allocates a configuration with the documented defaults. Release with
 * `pv_config_free`.
 */
PvConfig *pv_config_new(void);

/**
 * Releases a configuration handle. A null handle is a no-op.
 *
 * # Safety
 * `config` must be null or a pointer obtained from `pv_config_new`
 * that has not been freed already.
 */
void pv_config_free(PvConfig *config);

/**
 * Sets one configuration key from its string representation. Keys are
 * the flat JSON config keys (`burst_threshold`, `volatility_horizon`,
 * `pvi_bins`, `pvi_mode`, `topic_size_cap`, `kmax`, `kmeans_restarts`,
 * `sigma`, `tau`, `seed`, `baseline`). Rejected values leave the
 * configuration unchanged.
 *
 * # Safety
 * `config` must be a live handle from `pv_config_new`; `key` and
 * `value` must be NUL-terminated strings.
 */
enum PvStatus pv_config_set(PvConfig *config, const char *key, const char *value);

/**
 * Runs detection over a document stream (JSONL) and an index series
 * (CSV) and stores a result handle in `out`. The caller owns the
 * handle and releases it with `pv_events_free`.
 *
 * # Safety
 * `config` must be a live handle from `pv_config_new`; `docs_path` and
 * `index_path` must be NUL-terminated paths; `out` must point at
 * writable storage for one pointer.
 */
enum PvStatus pv_detect(const PvConfig *config,
                        const char *docs_path,
                        const char *index_path,
                        PvEvents **out);

/**
 * Number of detected events, ranked by score descending.
 *
 * # Safety
 * `events` must be a live handle from `pv_detect`; null returns 0.
 */
uintptr_t pv_events_len(const PvEvents *events);

/**
 * Stores the score of the event at `rank` (0-based) in `score`.
 *
 * # Safety
 * `events` must be a live handle from `pv_detect`; `score` must point
 * at writable storage for one double.
 */
enum PvStatus pv_events_score(const PvEvents *events, uintptr_t rank, double *score);

/**
 * Stores the inclusive window span of the event at `rank` (0-based).
 *
 * # Safety
 * `events` must be a live handle from `pv_detect`; `begin` and `end`
 * must point at writable storage for one size each.
 */
enum PvStatus pv_events_window_span(const PvEvents *events,
                                    uintptr_t rank,
                                    uintptr_t *begin,
                                    uintptr_t *end);

/**
 * Returns the full ranked report as a JSON array — the same content
 * the command-line `run` writes to `events.json`. The caller owns the
 * string and releases it with `pv_string_free`; null on a null handle.
 *
 * # Safety
 * `events` must be null or a live handle from `pv_detect`.
 */
char *pv_events_to_json(const PvEvents *events);

/**
 * Releases a string returned by `pv_events_to_json`. Null is a no-op.
 *
 * # Safety
 * `string` must be null or a pointer obtained from this library's
 * string-returning calls, not freed already.
 */
void pv_string_free(char *string);

/**
 * Releases a result handle. A null handle is a no-op.
 *
 * # Safety
 * `events` must be null or a pointer obtained from `pv_detect` that
 * has not been freed already.
 */
void pv_events_free(PvEvents *events);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PRIMEVENT_H */
