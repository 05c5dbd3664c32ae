/*
 * pfdsim C interface.
 *
 * All functions return a pfd_status; on failure, pfd_last_error() describes
 * the most recent error on the calling thread. Handles are opaque and must
 * be released with the matching *_destroy function. Strings returned by the
 * library stay valid until the owning handle is destroyed.
 */
#ifndef PFDSIM_H
#define PFDSIM_H

#include <stddef.h>

#if defined(PFDSIM_BUILDING_LIBRARY)
#define PFD_API __attribute__((visibility("default")))
#else
#define PFD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pfd_status {
    PFD_OK = 0,
    PFD_ERR_INVALID_ARGUMENT = 1,
    PFD_ERR_SOLVER = 2,
    PFD_ERR_CHECK_FAILED = 3,
    PFD_ERR_IO = 4,
    PFD_ERR_INTERNAL = 5
} pfd_status;

typedef struct pfd_session pfd_session;
typedef struct pfd_result pfd_result;

PFD_API const char* pfd_version(void);
PFD_API const char* pfd_last_error(void);
PFD_API const char* pfd_status_name(pfd_status status);

/* Session: calibration, design point and experiment options. */
PFD_API pfd_status pfd_session_create(pfd_session** out);
PFD_API void pfd_session_destroy(pfd_session* session);
PFD_API pfd_status pfd_session_load_params(pfd_session* session, const char* path);
PFD_API pfd_status pfd_session_set(pfd_session* session, const char* key, const char* value);

/* Runs a named experiment ("transient", "deadzone", "fmax", "halfperiod",
 * "mismatch", "sweep-width", "corners", "characterize"). A failed search or
 * solver error returns no result. A completed run whose checks fail still
 * returns PFD_OK; query pfd_result_passed. */
PFD_API pfd_status pfd_session_run(pfd_session* session, const char* experiment, pfd_result** out);

/* Writes the canonical PFD netlist for the session's design point. */
PFD_API pfd_status pfd_session_export_netlist(const pfd_session* session, const char* path);

/* Transient analysis of a netlist file with the session's solver options.
 * t_stop and dt in seconds. */
PFD_API pfd_status pfd_simulate_netlist(const pfd_session* session, const char* netlist_path, double t_stop,
                                        double dt, pfd_result** out);

/* Merges report.json documents into one summary table. */
PFD_API pfd_status pfd_summarize(const pfd_session* session, const char* const* json_texts, size_t count,
                                 pfd_result** out);

PFD_API void pfd_result_destroy(pfd_result* result);
PFD_API const char* pfd_result_json(const pfd_result* result);
PFD_API const char* pfd_result_summary(const pfd_result* result);
/* 1 when every check passed (or there were none), else 0. */
PFD_API int pfd_result_passed(const pfd_result* result);
/* report.json, summary.txt, waves.csv when present, plot_*.svg if plots != 0. */
PFD_API pfd_status pfd_result_write(const pfd_result* result, const char* dir, int plots);

PFD_API size_t pfd_result_sample_count(const pfd_result* result);
PFD_API size_t pfd_result_probe_count(const pfd_result* result);
PFD_API const char* pfd_result_probe_name(const pfd_result* result, size_t index);
/* Borrowed pointers to time and voltage samples of a probe. */
PFD_API pfd_status pfd_result_probe(const pfd_result* result, const char* probe, const double** time,
                                    const double** value, size_t* count);

#ifdef __cplusplus
}
#endif

#endif
