#ifndef RTSIM_H
#define RTSIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum {
  RTSIM_STATUS_OK = 0,
  RTSIM_STATUS_NULL_POINTER = 1,
  RTSIM_STATUS_INVALID_UTF8 = 2,
  RTSIM_STATUS_UNKNOWN_SCENARIO = 3,
  RTSIM_STATUS_UNKNOWN_KEY = 4,
  RTSIM_STATUS_BAD_VALUE = 5,
  RTSIM_STATUS_NOT_APPLICABLE = 6,
  RTSIM_STATUS_INVALID_CONFIG = 7,
  RTSIM_STATUS_INDEX_OUT_OF_RANGE = 8,
  RTSIM_STATUS_IO = 9,
  RTSIM_STATUS_PANIC = 10,
} RtsimStatus;

/**
 * Results of one completed run.
 */
typedef struct RtsimRun RtsimRun;

/**
 * A scenario definition that overrides can still be applied to.
 */
typedef struct RtsimScenario RtsimScenario;

/**
 * One virtual second of observations.
 */
typedef struct {
  uint64_t second;
  uint64_t sent;
  uint64_t received;
  uint64_t enqueued;
  uint64_t dropped_disabled;
  uint64_t dropped_full;
  uint64_t processed;
  uint64_t cycles_completed;
  /**
   * Summed cycle lateness in percent of one period.
   */
  double lateness_pct;
  uint64_t queue_len;
  double interrupts_off_fraction;
  uint64_t cpu_isr_us;
  uint64_t cpu_tick_us;
  uint64_t cpu_driver_us;
  uint64_t cpu_critical_us;
  uint64_t cpu_idle_us;
} RtsimSnapshot;

/**
 * Whole-run counters.
 */
typedef struct {
  uint64_t sent;
  uint64_t received;
  uint64_t enqueued;
  uint64_t dropped_disabled;
  uint64_t dropped_full;
  uint64_t processed;
  uint64_t cycles_completed;
  uint64_t lateness_us;
  uint64_t end_time_us;
  uint64_t final_queue_len;
} RtsimTotals;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string.
 */
const char *rtsim_version(void);

/**
 * Number of builtin scenarios.
 */
size_t rtsim_scenario_count(void);

/**
 * Name of builtin scenario `index`, or null when out of range. The string is static.
 */
const char *rtsim_scenario_name(size_t index);

/**
 * Message for the last failed call on this thread, or null. Valid until the next
 * failing call on the same thread.
 */
const char *rtsim_last_error(void);

/**
 * Creates a scenario handle from a builtin name.
 *
 * # Safety
 * `name` must be a valid C string and `out` a valid pointer.
 */
RtsimStatus rtsim_scenario_new(const char *name, RtsimScenario **out);

/**
 * Applies one override, using the same keys as the command-line flags
 * without the leading dashes (`"capacity"`, `"queue-size"`, ...).
 *
 * # Safety
 * `scenario` must come from [`rtsim_scenario_new`]; `key` and `value` must be valid C strings.
 */
RtsimStatus rtsim_scenario_set(RtsimScenario *scenario, const char *key, const char *value);

/**
 * Simulation length in virtual seconds.
 *
 * # Safety
 * `scenario` must be null or come from [`rtsim_scenario_new`].
 */
uint64_t rtsim_scenario_duration(const RtsimScenario *scenario);

/**
 * Runs the scenario to completion. The scenario handle stays usable.
 *
 * # Safety
 * `scenario` must come from [`rtsim_scenario_new`] and `out` be a valid pointer.
 */
RtsimStatus rtsim_scenario_run(const RtsimScenario *scenario, RtsimRun **out);

/**
 * # Safety
 * `scenario` must be null or come from [`rtsim_scenario_new`], and not be used afterwards.
 */
void rtsim_scenario_free(RtsimScenario *scenario);

/**
 * Number of per-second snapshots in a run.
 *
 * # Safety
 * `run` must be null or come from [`rtsim_scenario_run`].
 */
size_t rtsim_run_snapshot_count(const RtsimRun *run);

/**
 * Copies snapshot `index` into `out`.
 *
 * # Safety
 * `run` must come from [`rtsim_scenario_run`] and `out` be a valid pointer.
 */
RtsimStatus rtsim_run_snapshot(const RtsimRun *run, size_t index, RtsimSnapshot *out);

/**
 * # Safety
 * `run` must come from [`rtsim_scenario_run`] and `out` be a valid pointer.
 */
RtsimStatus rtsim_run_totals(const RtsimRun *run, RtsimTotals *out);

/**
 * The run as CSV text, or null on a null handle. Release with [`rtsim_string_free`].
 *
 * # Safety
 * `run` must be null or come from [`rtsim_scenario_run`].
 */
char *rtsim_run_csv(const RtsimRun *run);

/**
 * Writes `packets.svg` and `critical.svg` into `dir`, creating it if needed.
 *
 * # Safety
 * `run` must come from [`rtsim_scenario_run`]; `dir` must be a valid C string.
 */
RtsimStatus rtsim_run_write_charts(const RtsimRun *run, const char *dir);

/**
 * # Safety
 * `run` must be null or come from [`rtsim_scenario_run`], and not be used afterwards.
 */
void rtsim_run_free(RtsimRun *run);

/**
 * # Safety
 * `s` must be null or a string returned by this library, released once.
 */
void rtsim_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RTSIM_H */
