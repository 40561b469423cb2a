/* markcut C API. Strings returned through out-parameters are heap
 * allocated and must be released with mc_string_free. */
#ifndef MARKCUT_MARKCUT_H
#define MARKCUT_MARKCUT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(MARKCUT_BUILDING)
#define MC_API __attribute__((visibility("default")))
#else
#define MC_API
#endif

typedef struct mc_store mc_store;

typedef enum mc_status {
  MC_OK = 0,
  MC_ERR_ARGUMENT = 1,
  MC_ERR_VALIDATION = 2,
  MC_ERR_BUNDLE = 3,
  MC_ERR_FORMAT = 4,
  MC_ERR_DETECTION = 5,
  MC_ERR_DEGENERATE_GEOMETRY = 6,
  MC_ERR_GEOMETRY = 7,
  MC_ERR_EMPTY_WORKSPACE = 8,
  MC_ERR_SURFACE_NOT_FOUND = 9,
  MC_ERR_MALFORMED_LOOP = 10,
  MC_ERR_PARSE = 11,
  MC_ERR_EMIT = 12,
  MC_ERR_SIMULATION = 13,
  MC_ERR_SPEC = 14,
  MC_ERR_NOT_FOUND = 15,
  MC_ERR_CONFIRM_BLOCKED = 16,
  MC_ERR_IO = 17,
  MC_ERR_INTERNAL = 18
} mc_status;

MC_API const char* mc_version(void);
MC_API const char* mc_status_name(mc_status status);

/* Message of the last failed call on this thread, or "". */
MC_API const char* mc_last_error(void);
/* Pipeline stage of the last failed call on this thread, or "". */
MC_API const char* mc_last_error_stage(void);

MC_API void mc_string_free(char* s);

/* options_json may be NULL: {"base_resolution_mm": 2.0, "animation_frames": 8} */
MC_API mc_status mc_store_open(const char* root, const char* options_json, mc_store** out);
MC_API void mc_store_close(mc_store* store);

/* Job records are JSON text. */
MC_API mc_status mc_job_submit(mc_store* store, const char* bundle_dir, char** record_json);
MC_API mc_status mc_job_get(mc_store* store, const char* job_id, char** record_json);
MC_API mc_status mc_job_latest(mc_store* store, char** job_id);
MC_API mc_status mc_job_update_params(mc_store* store, const char* job_id, const char* patch_json,
                                      char** record_json);
MC_API mc_status mc_job_simulate(mc_store* store, const char* job_id, char** report_json);
MC_API mc_status mc_job_confirm(mc_store* store, const char* job_id, char** gcode);
MC_API mc_status mc_job_gcode(mc_store* store, const char* job_id, char** gcode);
/* Binary-safe artifact fetch (surface, program, depthmap, mesh/<which>, animation/<k>, gcode). */
MC_API mc_status mc_job_artifact(mc_store* store, const char* job_id, const char* name, char** data,
                                 size_t* size);

/* Serves the HTTP API until the process exits. */
MC_API mc_status mc_serve(mc_store* store, const char* host, int port);

/* Truth and measured files hold one "x,y" pair in mm per line. Writes
 * alignment.json, heatmap.pgm and vectors.csv to out_dir when it is not NULL. */
MC_API mc_status mc_eval_align(const char* truth_path, const char* measured_path, const char* out_dir,
                               double vector_scale, char** report_json);

/* Renders a SceneSpec (JSON) to a scan bundle directory; returns ground truth JSON. */
MC_API mc_status mc_render_scene(const char* spec_json, const char* out_dir, char** truth_json);

#ifdef __cplusplus
}
#endif

#endif /* MARKCUT_MARKCUT_H */
