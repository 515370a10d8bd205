/* Copyright 2026 The augment Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to libaugment.
 *
 * Every fallible call returns an aug_status. On failure the calling thread's
 * aug_last_error() describes what went wrong until the next failing call.
 * Objects are opaque handles released with their *_free function; strings
 * returned through char** out-parameters are released with aug_string_free.
 */
#ifndef AUGMENT_AUGMENT_H
#define AUGMENT_AUGMENT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(AUGMENT_BUILDING_LIBRARY)
#    define AUG_API __declspec(dllexport)
#  else
#    define AUG_API __declspec(dllimport)
#  endif
#else
#  define AUG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aug_status {
    AUG_OK = 0,
    AUG_ERR_INVALID_ARGUMENT = 1,
    AUG_ERR_GEOMETRY = 2,
    AUG_ERR_VALIDATION = 3,
    AUG_ERR_PROTOCOL = 4,
    AUG_ERR_TRANSPORT = 5,
    AUG_ERR_REMOTE = 6,
    AUG_ERR_NUMERIC = 7,
    AUG_ERR_CONFIG = 8,
    AUG_ERR_OVERFLOW = 9,
    AUG_ERR_IO = 10,
    AUG_ERR_NOT_FOUND = 11,
    AUG_ERR_INTERNAL = 12
} aug_status;

AUG_API const char* aug_status_name(aug_status status);
AUG_API const char* aug_last_error(void);
AUG_API const char* aug_version(void);
AUG_API void aug_string_free(char* str);

/* Images (8-bit RGB) and binary masks, loaded from and saved to PNG. */
typedef struct aug_image aug_image;
typedef struct aug_mask aug_mask;

AUG_API aug_status aug_image_load(const char* path, aug_image** out);
AUG_API aug_status aug_image_save(const aug_image* image, const char* path);
AUG_API int aug_image_width(const aug_image* image);
AUG_API int aug_image_height(const aug_image* image);
AUG_API void aug_image_free(aug_image* image);

AUG_API aug_status aug_mask_load(const char* path, aug_mask** out);
AUG_API aug_status aug_mask_save(const aug_mask* mask, const char* path);
AUG_API int aug_mask_width(const aug_mask* mask);
AUG_API int aug_mask_height(const aug_mask* mask);
AUG_API aug_status aug_mask_coverage(const aug_mask* mask, double* out);
AUG_API void aug_mask_free(aug_mask* mask);

/* Regions of a placement mask as a JSON array of
 * {"index","rect":{"x","y","w","h"},"coverage","feasible"}. */
AUG_API aug_status aug_extract_regions(const aug_mask* placement, double band_low,
                                       double band_high, char** out_json);

/* Size of the combination space for N regions with L variations each. */
AUG_API aug_status aug_count_combinations(uint64_t regions, uint64_t variations,
                                          uint64_t* out);

/* Combination keys, one per line in "0b101:2,0" form. count == 0 enumerates
 * the whole space in canonical order; otherwise `count` distinct keys are
 * sampled with `seed`. */
AUG_API aug_status aug_combination_keys(uint64_t regions, uint64_t variations, uint64_t count,
                                        uint64_t seed, char** out_lines);

/* Reads a boxes sidecar ("image_id x y w h" per line), loads
 * images_dir/<image_id>.png and writes one training quadruple per box under
 * out_dir. */
AUG_API aug_status aug_extract_pairs(const char* boxes_path, const char* images_dir,
                                     const char* out_dir, size_t* out_pairs);

/* Loads and validates a manifest; reports the record count. */
AUG_API aug_status aug_manifest_validate(const char* manifest_path, size_t* out_records);

/* Binary IoU of prediction masks predictions_dir/<id>.png against the
 * manifest's masks. Either output may be NULL. */
AUG_API aug_status aug_evaluate(const char* manifest_path, const char* predictions_dir,
                                const char* method, char** out_report_json, char** out_table);

/* Pipeline: a task plus generation settings, parsed from a JSON document.
 * Relative paths in the task resolve against base_dir. */
typedef struct aug_pipeline aug_pipeline;

AUG_API aug_status aug_pipeline_create(const char* config_json, const char* base_dir,
                                       aug_pipeline** out);
AUG_API aug_status aug_pipeline_set_seed(aug_pipeline* pipeline, uint64_t seed);
AUG_API aug_status aug_pipeline_set_threshold(aug_pipeline* pipeline, double threshold);
AUG_API aug_status aug_pipeline_set_variations(aug_pipeline* pipeline, int variations);
AUG_API aug_status aug_pipeline_set_samples(aug_pipeline* pipeline, uint64_t samples);
/* Effective configuration as JSON. */
AUG_API aug_status aug_pipeline_config(const aug_pipeline* pipeline, char** out_json);
/* Generates an augmented dataset under out_dir; out_summary_json may be NULL. */
AUG_API aug_status aug_pipeline_generate(aug_pipeline* pipeline, const char* out_dir,
                                         char** out_summary_json);
/* Copy-paste baseline dataset with the same sample budget. */
AUG_API aug_status aug_pipeline_copy_paste(aug_pipeline* pipeline, const char* out_dir,
                                           char** out_summary_json);
AUG_API void aug_pipeline_free(aug_pipeline* pipeline);

/* Studio HTTP service over task_dir, initialised from the pipeline's task if
 * task_dir/task.json does not exist. With mock_backends != 0 the service also
 * answers the /v1 model routes itself. */
typedef struct aug_service aug_service;

AUG_API aug_status aug_service_create(const aug_pipeline* pipeline, const char* task_dir,
                                      int mock_backends, aug_service** out);
/* port 0 picks a free port. */
AUG_API aug_status aug_service_bind(aug_service* service, const char* host, int port,
                                    int* out_port);
/* Blocks until aug_service_stop. */
AUG_API aug_status aug_service_listen(aug_service* service);
AUG_API void aug_service_stop(aug_service* service);
AUG_API void aug_service_free(aug_service* service);

#ifdef __cplusplus
}
#endif

#endif /* AUGMENT_AUGMENT_H */
