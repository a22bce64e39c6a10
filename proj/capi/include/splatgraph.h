#ifndef SPLATGRAPH_H
#define SPLATGRAPH_H

/* C interface to the reconstruction library: scene loading, rendering, view
 * optimization, scene-graph synthesis, and physical assembly behind opaque
 * handles. All functions return sg_status (SG_OK on success); the most recent
 * error message for the calling thread is available via sg_last_error. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SG_API __declspec(dllexport)
#else
#define SG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sg_status {
    SG_OK = 0,
    SG_ERROR_INVALID_ARGUMENT = 1,
    SG_ERROR_PARSE = 2,
    SG_ERROR_VALIDATION = 3,
    SG_ERROR_IO = 4,
    SG_ERROR_NOT_FOUND = 5,
    SG_ERROR_OPTIMIZATION = 6,
    SG_ERROR_BACKEND = 7,
    SG_ERROR_PHYSICS = 8,
    SG_ERROR_INTERNAL = 9
} sg_status;

typedef struct sg_scene sg_scene;
typedef struct sg_render sg_render;
typedef struct sg_graph sg_graph;
typedef struct sg_assembly sg_assembly;

/* Library version as "major.minor.patch". */
SG_API const char* sg_version(void);

/* Thread-local message for the last failing call; empty string if none. */
SG_API const char* sg_last_error(void);

/* ------------------------------------------------------------------ scenes */

/* Loads "<stem>.ply" plus its "<stem>.json" sidecar. options_json may be NULL
 * or a JSON object: {"scale_encoding": "linear"|"log",
 * "opacity_encoding": "linear"|"logit", "validate": bool}. */
SG_API sg_status sg_scene_load(const char* path, const char* options_json, sg_scene** out);
SG_API sg_status sg_scene_save(const sg_scene* scene, const char* path);
SG_API void sg_scene_free(sg_scene* scene);

/* Deterministic synthetic scene. layout is "tabletop", "apartment", or
 * "occlusion_pair"; params_json may be NULL or override generator defaults.
 * The generator's ground-truth relation graph is retrievable via
 * sg_scene_ground_truth_json. */
SG_API sg_status sg_scene_synth(const char* layout, uint64_t seed, const char* params_json,
                                sg_scene** out);

SG_API sg_status sg_scene_stats_json(const sg_scene* scene, char** out_json);
SG_API sg_status sg_scene_ground_truth_json(const sg_scene* scene, char** out_json);

/* --------------------------------------------------------------- rendering */

/* camera_json: {"fx","fy","cx","cy","width","height","pose":{"q":[w,x,y,z],
 * "t":[x,y,z]}}. options_json may be NULL. */
SG_API sg_status sg_render_create(const sg_scene* scene, const char* camera_json,
                                  const char* options_json, sg_render** out);
SG_API void sg_render_free(sg_render* render);

SG_API sg_status sg_render_dims(const sg_render* render, int32_t* out_width,
                                int32_t* out_height);
/* buffer must hold width*height doubles. name: "alpha" or "depth". */
SG_API sg_status sg_render_read_map(const sg_render* render, const char* name, double* buffer);
/* buffer must hold width*height int32 instance ids. */
SG_API sg_status sg_render_read_instance(const sg_render* render, int32_t* buffer);
/* Per-object contribution map; object_id must exist in the scene. */
SG_API sg_status sg_render_read_contribution(const sg_render* render, int32_t object_id,
                                             double* buffer);
/* Writes alpha (and color when present) as RGBA PNG. */
SG_API sg_status sg_render_write_png(const sg_render* render, const char* path);
SG_API sg_status sg_render_object_information(const sg_render* render, int32_t object_id,
                                              double* out_information);

/* ------------------------------------------------------ view optimization */

/* config_json may be NULL or override optimizer defaults (iterations,
 * lambda_depth, image_width, seed, ...). Result JSON carries the optimized
 * camera, information value, loss history, and convergence flag. */
SG_API sg_status sg_optimize_view(const sg_scene* scene, int32_t object_id,
                                  const char* init_camera_json, const char* config_json,
                                  char** out_result_json);
SG_API sg_status sg_expand_views(const sg_scene* scene, int32_t object_id,
                                 const char* init_camera_json, const char* config_json,
                                 char** out_result_json);
/* Renders object-only condition images for previously optimized views
 * (views_json = result of sg_expand_views or an array of cameras). */
SG_API sg_status sg_export_condition_images(const sg_scene* scene, int32_t object_id,
                                            const char* views_json, const char* out_dir,
                                            int32_t export_size);

/* ------------------------------------------------------------ scene graphs */

/* backend: "geometric" (analytic relation rules), "scripted:<path>" (replays
 * a JSON triplet script), or "http:<url>" (external inference service).
 * config_json may be NULL. */
SG_API sg_status sg_graph_synthesize(const sg_scene* scene, const char* backend,
                                     const char* config_json, sg_graph** out);
SG_API sg_status sg_graph_from_json(const char* json_text, sg_graph** out);
SG_API sg_status sg_graph_to_json(const sg_graph* graph, char** out_json);
SG_API sg_status sg_graph_equal(const sg_graph* a, const sg_graph* b, int32_t* out_equal);
SG_API void sg_graph_free(sg_graph* graph);

/* ---------------------------------------------------------------- assembly */

/* Settles/attaches every object following the graph; writes nothing. proxy is
 * "obb" or "hull". */
SG_API sg_status sg_assemble(const sg_scene* scene, const sg_graph* graph, const char* proxy,
                             sg_assembly** out);
SG_API sg_status sg_assembly_report_json(const sg_assembly* assembly, char** out_json);
SG_API sg_status sg_assembly_write_manifest(const sg_assembly* assembly, const char* path);
SG_API void sg_assembly_free(sg_assembly* assembly);

/* -------------------------------------------------------------- full runs */

/* synth scene -> graph -> assembly -> artifacts in out_dir (scene files,
 * graph.json, manifest.json, run report). Deterministic per seed. */
SG_API sg_status sg_pipeline_run(const char* layout, uint64_t seed, const char* config_json,
                                 const char* out_dir, char** out_report_json);

/* Frees strings returned through out_json/out_report_json parameters. */
SG_API void sg_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* SPLATGRAPH_H */
