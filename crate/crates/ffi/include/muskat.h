#ifndef MUSKAT_H
#define MUSKAT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define MUSKAT_OK 0

#define MUSKAT_ERR_NULL 1

#define MUSKAT_ERR_UTF8 2

#define MUSKAT_ERR_VALIDATION 3

#define MUSKAT_ERR_PARAMETER 4

#define MUSKAT_ERR_COLLISION 5

#define MUSKAT_ERR_NUMERICAL 6

#define MUSKAT_ERR_BUFFER 7

#define MUSKAT_ERR_PANIC 8

#define MUSKAT_ERR_OTHER 9

/*
 A parsed and validated scenario.
 */
typedef struct MuskatScenario MuskatScenario;

/*
 A running two-interface simulation.
 */
typedef struct MuskatSimulation MuskatSimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Copies the last error message of this thread into `buf` (NUL-terminated, truncated to
 `len`). Returns the full message length in bytes, excluding the terminator.

 # Safety
 `buf` must be null or valid for `len` bytes of writes.
 */
size_t muskat_last_error_message(char *buf, size_t len);

/*
 Parses a scenario document. On success `*out` owns a new handle.

 # Safety
 `json` must be a NUL-terminated string; `out` must be valid for one pointer write.
 */
int muskat_scenario_from_json(const char *json, MuskatScenario **out);

/*
 # Safety
 `s` must be null or a handle from [`muskat_scenario_from_json`] not yet freed.
 */
void muskat_scenario_free(MuskatScenario *s);

/*
 Nodes per axis of the scenario grid.

 # Safety
 `s` must be a live scenario handle and `out` valid for one write.
 */
int muskat_scenario_resolution(const MuskatScenario *s, size_t *out);

/*
 Builds the initial state of a scenario and prepares to step it.

 # Safety
 `s` must be a live scenario handle and `out` valid for one pointer write.
 */
int muskat_simulation_new(const MuskatScenario *s, MuskatSimulation **out);

/*
 # Safety
 `sim` must be null or a handle from [`muskat_simulation_new`] not yet freed.
 */
void muskat_simulation_free(MuskatSimulation *sim);

/*
 Advances one time step (a no-op once the end time is reached).

 # Safety
 `sim` must be a live simulation handle.
 */
int muskat_simulation_step(MuskatSimulation *sim);

/*
 Steps until the scenario's end time.

 # Safety
 `sim` must be a live simulation handle.
 */
int muskat_simulation_run_to_end(MuskatSimulation *sim);

/*
 Current time and step count.

 # Safety
 `sim` must be a live simulation handle; `t` and `steps` must each be null or valid for one write.
 */
int muskat_simulation_time(const MuskatSimulation *sim, double *t, uint64_t *steps);

/*
 Copies both surfaces, row-major, into `f` and `g`, each of length `len = N * N`.

 # Safety
 `sim` must be a live simulation handle; `f` and `g` must be valid for `len` writes.
 */
int muskat_simulation_heights(const MuskatSimulation *sim, double *f, double *g, size_t len);

/*
 Linearized self-interaction rate `-(a/2)|k|`.
 */
double muskat_self_symbol(double k1, double k2, double a);

/*
 Linearized cross-interaction rate `-(a/2)|k| exp(-h|k|)`; `h` must be positive.

 # Safety
 `out` must be valid for one write.
 */
int muskat_cross_symbol(double k1, double k2, double a, double h, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MUSKAT_H */
