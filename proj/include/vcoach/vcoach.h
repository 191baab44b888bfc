/*
 * Copyright 2026 The vcoach Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef VCOACH_VCOACH_H
#define VCOACH_VCOACH_H

/* C interface to the vcoach simulator, coach, analytics and service.
 *
 * Conventions:
 *  - Every function returns a vc_status; VC_OK is zero.
 *  - On failure, vc_last_error() returns a message for the calling thread.
 *  - Strings returned through char** are owned by the caller and released
 *    with vc_free().
 *  - Structured inputs and outputs are JSON text using the field names of the
 *    session file format.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define VC_API __declspec(dllexport)
#else
#define VC_API __attribute__((visibility("default")))
#endif

typedef enum vc_status {
  VC_OK = 0,
  VC_E_INVALID_ARGUMENT = 1,
  VC_E_DOMAIN = 2,
  VC_E_PROTOCOL = 3,
  VC_E_IO = 4,
  VC_E_INTEGRITY = 5,
  VC_E_VERSION = 6,
  VC_E_NOT_FOUND = 7,
  VC_E_GENERATION = 8,
  VC_E_INTERNAL = 9
} vc_status;

typedef struct vc_engine vc_engine;
typedef struct vc_server vc_server;

VC_API const char* vc_version(void);
VC_API const char* vc_last_error(void);
VC_API const char* vc_status_name(vc_status status);
VC_API void vc_free(char* str);

/* Metric names in table order; keys of every metrics object. */
VC_API int vc_metric_count(void);
VC_API const char* vc_metric_name(int index);

/* Session configuration: {"task": {...}, "thresholds": [...], "start_segment": n}.
 * Missing keys take defaults. NULL or "" yields the default configuration. */
VC_API vc_status vc_default_config(char** config_json);

/* ---- Engine ------------------------------------------------------------ */

/* header_json: {"config", "mode", "participant", "handedness", "seed"}; every
 * key is optional. */
VC_API vc_status vc_engine_create(const char* header_json, vc_engine** out);
VC_API void vc_engine_destroy(vc_engine* engine);
/* input_json: {"t", "L", "R", "master"} with t equal to the next tick.
 * events_json receives the events logged for the tick. */
VC_API vc_status vc_engine_step(vc_engine* engine, const char* input_json, char** events_json);
/* Live state in the ServerState message layout. */
VC_API vc_status vc_engine_state(const vc_engine* engine, char** state_json);
VC_API int64_t vc_engine_next_tick(const vc_engine* engine);
VC_API int vc_engine_complete(const vc_engine* engine);
/* Computes the footer and writes the session file. metrics_json may be NULL. */
VC_API vc_status vc_engine_finish(vc_engine* engine, const char* path, char** metrics_json);

/* ---- Sessions ---------------------------------------------------------- */

/* Re-runs the recorded inputs and checks the stored footer. */
VC_API vc_status vc_session_replay(const char* path, char** metrics_json);
/* Offline metrics from the logged ticks and events. */
VC_API vc_status vc_session_score(const char* path, char** metrics_json);
/* Drives a fresh engine from a file of input lines ({"t","L","R","master"})
 * and writes the session. */
VC_API vc_status vc_session_run_inputs(const char* header_json, const char* inputs_path, const char* out_path,
                                       char** metrics_json);

/* ---- Synthetic trainees ------------------------------------------------ */

/* request_json: {"profile": "expert"|"novice", "seed", "mode", "participant",
 * "handedness", "config", "segments", plus optional profile overrides
 * "grasp_bias", "grasp_noise", "orientation_bias", "orientation_noise",
 * "wobble", "extra_movement_rate", "pace", "help_probability"}. */
VC_API vc_status vc_synth_session(const char* request_json, const char* out_path, char** metrics_json);
/* options_json: {"plan": "study"|"control", "profile", "n", "seed", "config",
 * "coached_orientation_gain", "prefix"}. Writes <dir>/<participant>/<label>.vcs. */
VC_API vc_status vc_synth_cohort(const char* options_json, const char* dir);
/* One expert clip per segment into dir/segment_<k>.vcs. */
VC_API vc_status vc_build_clips(const char* config_json, uint64_t seed, const char* dir);

/* ---- Analytics --------------------------------------------------------- */

/* Loads every *.vcs below each arm directory (<participant>/<label>.vcs).
 * text receives the final-repetition table followed by the effect grid; json
 * the full report; grid_csv the effect grid. Any output may be NULL. */
VC_API vc_status vc_report(const char* experimental_dir, const char* control_dir, char** text, char** json,
                           char** grid_csv);

/* ---- Service ----------------------------------------------------------- */

/* options_json: {"address", "port", "data_dir", "token", "config", "speed",
 * "threads"}. */
VC_API vc_status vc_server_create(const char* options_json, vc_server** out);
VC_API vc_status vc_server_start(vc_server* server);
VC_API uint16_t vc_server_port(const vc_server* server);
/* Blocks until SIGINT or SIGTERM. */
VC_API vc_status vc_server_wait_signal(vc_server* server);
VC_API void vc_server_stop(vc_server* server);
VC_API void vc_server_destroy(vc_server* server);

#ifdef __cplusplus
}
#endif

#endif /* VCOACH_VCOACH_H */
