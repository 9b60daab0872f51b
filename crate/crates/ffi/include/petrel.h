#ifndef PETREL_H
#define PETREL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  PETREL_STATUS_OK = 0,
  PETREL_STATUS_NULL_POINTER = 1,
  PETREL_STATUS_INVALID_ARGUMENT = 2,
  PETREL_STATUS_CONFIG_ERROR = 3,
  PETREL_STATUS_TRACE_ERROR = 4,
  PETREL_STATUS_SIMULATION_ERROR = 5,
  PETREL_STATUS_IO_ERROR = 6,
  PETREL_STATUS_OUT_OF_RANGE = 7,
  PETREL_STATUS_PANIC = 8,
} PetrelStatus;

typedef enum {
  PETREL_TASK_CLASS_SENSITIVE = 0,
  PETREL_TASK_CLASS_TOLERANT = 1,
} PetrelTaskClass;

typedef struct PetrelConfig PetrelConfig;

typedef struct PetrelRun PetrelRun;

typedef struct PetrelTrace PetrelTrace;

/**
 * Aggregate metrics for one run.
 */
typedef struct {
  uint64_t task_count;
  double awt;
  double makespan_min_ms;
  double makespan_max_ms;
  double makespan_avg_ms;
  double avg_speedup;
  uint64_t bound_violations;
  uint64_t delayed_tasks;
} PetrelSummary;

/**
 * One task outcome. `executor` is -1 for cloud execution and
 * `bound_violated` is -1 for latency-sensitive tasks.
 */
typedef struct {
  uint32_t task_id;
  PetrelTaskClass task_class;
  uint32_t daemon_id;
  int32_t executor;
  double arrival_ms;
  double assign_ms;
  double start_ms;
  double completion_ms;
  double turnaround_ms;
  double service_ms;
  double comm_ms;
  double speedup;
  uint32_t delays;
  int8_t bound_violated;
} PetrelRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next petrel call on the same thread.
 */
const char *petrel_last_error_message(void);

/**
 * Static, NUL-terminated crate version.
 */
const char *petrel_version(void);

/**
 * Creates the default configuration.
 */
PetrelStatus petrel_config_default(PetrelConfig **out);

/**
 * Parses a configuration from TOML text.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
PetrelStatus petrel_config_from_toml(const char *text, PetrelConfig **out);

/**
 * Loads a configuration file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer.
 */
PetrelStatus petrel_config_load(const char *path, PetrelConfig **out);

/**
 * Overrides the number of generated tasks.
 *
 * # Safety
 * `config` must be a live handle.
 */
PetrelStatus petrel_config_set_tasks(PetrelConfig *config, uint64_t tasks);

/**
 * Number of cloudlets in the configured topology.
 *
 * # Safety
 * `config` must be a live handle or null.
 */
uint64_t petrel_config_cloudlet_count(const PetrelConfig *config);

/**
 * # Safety
 * `config` must come from this library and not be used afterwards.
 */
void petrel_config_free(PetrelConfig *config);

/**
 * Generates a Poisson trace of the configured task count.
 *
 * # Safety
 * `config` must be a live handle and `out` a writable pointer.
 */
PetrelStatus petrel_trace_generate(const PetrelConfig *config,
                                   double lambda,
                                   uint64_t seed,
                                   PetrelTrace **out);

/**
 * Reads a trace file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer.
 */
PetrelStatus petrel_trace_load(const char *path, PetrelTrace **out);

/**
 * Writes a trace file.
 *
 * # Safety
 * `trace` must be a live handle and `path` a NUL-terminated string.
 */
PetrelStatus petrel_trace_save(const PetrelTrace *trace, const char *path);

/**
 * # Safety
 * `trace` must be a live handle or null.
 */
uint64_t petrel_trace_len(const PetrelTrace *trace);

/**
 * # Safety
 * `trace` must come from this library and not be used afterwards.
 */
void petrel_trace_free(PetrelTrace *trace);

/**
 * Runs `scheduler` over `trace` on the topology drawn from `seed`. A null
 * `trace` generates one from the configuration.
 *
 * # Safety
 * `config` must be a live handle, `trace` a live handle or null,
 * `scheduler` a NUL-terminated string and `out` a writable pointer.
 */
PetrelStatus petrel_run(const PetrelConfig *config,
                        const PetrelTrace *trace,
                        const char *scheduler,
                        double lambda,
                        uint64_t seed,
                        PetrelRun **out);

/**
 * # Safety
 * `run` must be a live handle and `out` a writable pointer.
 */
PetrelStatus petrel_run_summary(const PetrelRun *run, PetrelSummary *out);

/**
 * # Safety
 * `run` must be a live handle or null.
 */
uint64_t petrel_run_record_count(const PetrelRun *run);

/**
 * Copies record `index`, in task id order.
 *
 * # Safety
 * `run` must be a live handle and `out` a writable pointer.
 */
PetrelStatus petrel_run_record(const PetrelRun *run, uint64_t index, PetrelRecord *out);

/**
 * Writes the per-task CSV.
 *
 * # Safety
 * `run` must be a live handle and `path` a NUL-terminated string.
 */
PetrelStatus petrel_run_write_records(const PetrelRun *run, const char *path);

/**
 * # Safety
 * `run` must come from this library and not be used afterwards.
 */
void petrel_run_free(PetrelRun *run);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PETREL_H */
