#ifndef GME_H
#define GME_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GmeStatus {
  GME_STATUS_OK = 0,
  GME_STATUS_NULL_POINTER = 1,
  GME_STATUS_INVALID_ARGUMENT = 2,
  GME_STATUS_CONFIG = 3,
  GME_STATUS_NUMERICAL = 4,
  GME_STATUS_IO = 5,
  GME_STATUS_PANIC = 6,
} GmeStatus;

// A validated scenario configuration.
typedef struct GmeConfig GmeConfig;

// Sampled observables of one propagation.
typedef struct GmeTrajectory GmeTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread. Valid until the next failing call.
const char *gme_last_error(void);

// Library version as a static NUL-terminated string.
const char *gme_version(void);

// Parses and validates a JSON configuration.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a writable pointer.
enum GmeStatus gme_config_from_json(const char *json, struct GmeConfig **out);

// Configuration of a preset scenario (`rabi-temp-sweep`, `rabi-compare`, `dce`, `hu-failure`).
//
// # Safety
// `name` must be a NUL-terminated string and `out` a writable pointer.
enum GmeStatus gme_config_preset(const char *name, struct GmeConfig **out);

// # Safety
// `config` must come from this library and not be used afterwards. Null is ignored.
void gme_config_free(struct GmeConfig *config);

// Number of (temperature, method) points the configuration expands to.
//
// # Safety
// `config` must be a live handle and `out` a writable pointer.
enum GmeStatus gme_config_num_points(const struct GmeConfig *config, uintptr_t *out);

// Propagates point `index` of the configuration.
//
// # Safety
// `config` must be a live handle and `out` a writable pointer.
enum GmeStatus gme_simulate(const struct GmeConfig *config,
                            uintptr_t index,
                            struct GmeTrajectory **out);

// # Safety
// `traj` must come from this library and not be used afterwards. Null is ignored.
void gme_trajectory_free(struct GmeTrajectory *traj);

// # Safety
// `traj` must be a live handle; `samples` and `series` writable pointers.
enum GmeStatus gme_trajectory_shape(const struct GmeTrajectory *traj,
                                    uintptr_t *samples,
                                    uintptr_t *series);

// Name of series `index`; the string lives as long as the trajectory.
//
// # Safety
// `traj` must be a live handle and `out` a writable pointer.
enum GmeStatus gme_trajectory_name(const struct GmeTrajectory *traj,
                                   uintptr_t index,
                                   const char **out);

// Copies the sample times into `dst`, which must hold at least the sample count.
//
// # Safety
// `traj` must be a live handle and `dst` valid for `len` writes.
enum GmeStatus gme_trajectory_times(const struct GmeTrajectory *traj, double *dst, uintptr_t len);

// Copies series `index` into `dst`. Undefined correlation samples are NaN.
//
// # Safety
// `traj` must be a live handle and `dst` valid for `len` writes.
enum GmeStatus gme_trajectory_series(const struct GmeTrajectory *traj,
                                     uintptr_t index,
                                     double *dst,
                                     uintptr_t len);

// Spectrum report (energies, transition tables, doublet) as a JSON string.
// Release it with [`gme_string_free`].
//
// # Safety
// `config` must be a live handle and `out` a writable pointer.
enum GmeStatus gme_spectrum_json(const struct GmeConfig *config, char **out);

// # Safety
// `s` must come from this library and not be used afterwards. Null is ignored.
void gme_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GME_H */
