/* Copyright 2026 The PASTA Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

/*
 * C interface to libpasta.
 *
 * Objects are opaque handles created by pasta_*_create / _read / _load /
 * _fit functions and released with the matching _free function (passing
 * NULL is allowed). Every fallible call returns a pasta_status; on failure
 * pasta_last_error() returns a message describing the most recent error on
 * the calling thread. Output handles are only written on success.
 */

#ifndef PASTA_PASTA_H
#define PASTA_PASTA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PASTA_API __declspec(dllexport)
#else
#define PASTA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pasta_status {
  PASTA_OK = 0,
  PASTA_ERR_BAD_MAGIC = 1,
  PASTA_ERR_TRUNCATED = 2,
  PASTA_ERR_NON_FINITE = 3,
  PASTA_ERR_UNSUPPORTED_FORMAT = 4,
  PASTA_ERR_VALUE_OUT_OF_RANGE = 5,
  PASTA_ERR_MISSING_FILE = 6,
  PASTA_ERR_DIM_MISMATCH = 7,
  PASTA_ERR_EMPTY_MANIFEST = 8,
  PASTA_ERR_VERSION_MISMATCH = 9,
  PASTA_ERR_CORRUPT = 10,
  PASTA_ERR_TOO_FEW_SAMPLES = 11,
  PASTA_ERR_DEGENERATE_DATA = 12,
  PASTA_ERR_EMPTY_INPUT = 13,
  PASTA_ERR_K_MISMATCH = 14,
  PASTA_ERR_EMPTY_MASK = 15,
  PASTA_ERR_BAD_DIMS = 16,
  PASTA_ERR_BAG_TOO_SMALL = 17,
  PASTA_ERR_ALL_CLASSES_UNDEFINED = 18,
  PASTA_ERR_PLACEMENT_FAILURE = 19,
  PASTA_ERR_INVALID_ARGUMENT = 20,
  PASTA_ERR_IO = 21,
  PASTA_ERR_INTERNAL = 22
} pasta_status;

typedef struct pasta_grid pasta_grid;
typedef struct pasta_raster pasta_raster;
typedef struct pasta_manifest pasta_manifest;
typedef struct pasta_codebook pasta_codebook;
typedef struct pasta_model pasta_model;
typedef struct pasta_bag pasta_bag;

/* Library state ---------------------------------------------------------- */

PASTA_API const char* pasta_version(void);
PASTA_API const char* pasta_status_name(pasta_status status);
/* 1 when the status reflects a filesystem problem rather than bad data. */
PASTA_API int pasta_status_is_io(pasta_status status);
PASTA_API const char* pasta_last_error(void);
/* Worker threads for internal parallel loops. Never changes results. */
PASTA_API void pasta_set_threads(int threads);
PASTA_API int pasta_get_threads(void);
PASTA_API void pasta_set_warnings(int enabled);

/* Feature grids ---------------------------------------------------------- */

PASTA_API pasta_status pasta_grid_create(uint32_t rows, uint32_t cols, uint32_t dim,
                                         const float* data, pasta_grid** out);
PASTA_API pasta_status pasta_grid_read(const char* path, pasta_grid** out);
PASTA_API pasta_status pasta_grid_write(const pasta_grid* grid, const char* path);
PASTA_API void pasta_grid_shape(const pasta_grid* grid, uint32_t* rows, uint32_t* cols,
                                uint32_t* dim);
PASTA_API const float* pasta_grid_data(const pasta_grid* grid);
PASTA_API void pasta_grid_free(pasta_grid* grid);

/* Label rasters ---------------------------------------------------------- */

typedef enum pasta_raster_kind {
  PASTA_RASTER_TRI_CLASS = 0,
  PASTA_RASTER_INSTANCE = 1
} pasta_raster_kind;

PASTA_API pasta_status pasta_raster_create(uint32_t height, uint32_t width,
                                           pasta_raster_kind kind, const uint16_t* values,
                                           pasta_raster** out);
PASTA_API pasta_status pasta_raster_read(const char* path, pasta_raster_kind kind,
                                         pasta_raster** out);
PASTA_API pasta_status pasta_raster_write(const pasta_raster* raster, const char* path);
PASTA_API void pasta_raster_shape(const pasta_raster* raster, uint32_t* height,
                                  uint32_t* width);
PASTA_API const uint16_t* pasta_raster_data(const pasta_raster* raster);
PASTA_API void pasta_raster_free(pasta_raster* raster);

/* Manifests -------------------------------------------------------------- */

PASTA_API pasta_status pasta_manifest_read(const char* path, pasta_manifest** out);
PASTA_API size_t pasta_manifest_size(const pasta_manifest* manifest);
PASTA_API uint32_t pasta_manifest_dim(const pasta_manifest* manifest);
PASTA_API void pasta_manifest_free(pasta_manifest* manifest);

/* Clustering ------------------------------------------------------------- */

typedef struct pasta_minibatch_config {
  uint64_t batch_size;
  uint32_t max_epochs;
  double tol;
  uint64_t init_sample_size;
  uint64_t seed;
} pasta_minibatch_config;

PASTA_API pasta_minibatch_config pasta_minibatch_config_default(void);

/* Fits on every patch of every grid in the manifest. */
PASTA_API pasta_status pasta_codebook_fit(const pasta_manifest* mixed, uint32_t k,
                                          const pasta_minibatch_config* config,
                                          pasta_codebook** out);
PASTA_API pasta_status pasta_codebook_save(const pasta_codebook* codebook, const char* path);
PASTA_API pasta_status pasta_codebook_load(const char* path, pasta_codebook** out);
PASTA_API uint32_t pasta_codebook_k(const pasta_codebook* codebook);
PASTA_API uint32_t pasta_codebook_dim(const pasta_codebook* codebook);
/* k * dim doubles, row-major. */
PASTA_API const double* pasta_codebook_centroids(const pasta_codebook* codebook);
PASTA_API pasta_status pasta_codebook_assign(const pasta_codebook* codebook,
                                             const float* vector, uint32_t dim,
                                             uint32_t* cluster);
PASTA_API void pasta_codebook_free(pasta_codebook* codebook);

/* Models ----------------------------------------------------------------- */

/* Tallies both corpora with the frozen codebook and flags clusters whose
   reference/mixed probability ratio is defined and below ratio_threshold. */
PASTA_API pasta_status pasta_model_build(const pasta_codebook* codebook,
                                         const pasta_manifest* mixed,
                                         const pasta_manifest* reference,
                                         double ratio_threshold, double gamma,
                                         pasta_model** out);
PASTA_API pasta_status pasta_model_save(const pasta_model* model, const char* path);
PASTA_API pasta_status pasta_model_load(const char* path, pasta_model** out);
PASTA_API uint32_t pasta_model_k(const pasta_model* model);
PASTA_API double pasta_model_gamma(const pasta_model* model);
PASTA_API int pasta_model_is_anomaly(const pasta_model* model, uint32_t cluster);
/* Returns 0 and leaves *ratio untouched when the ratio is undefined. */
PASTA_API int pasta_model_ratio(const pasta_model* model, uint32_t cluster, double* ratio);
PASTA_API pasta_status pasta_model_write_histogram(const pasta_model* model,
                                                   const char* csv_path);
PASTA_API void pasta_model_free(pasta_model* model);

/* Inference -------------------------------------------------------------- */

/* Patch-level anomaly map of one grid, upsampled to height x width with
   classes {0, 2}. */
PASTA_API pasta_status pasta_infer_patch(const pasta_model* model, const pasta_grid* grid,
                                         uint32_t height, uint32_t width,
                                         pasta_raster** out);
/* Tri-class mask from instance masks given as an instance-id raster. */
PASTA_API pasta_status pasta_infer_fused(const pasta_model* model, const pasta_grid* grid,
                                         const pasta_raster* instances, pasta_raster** out);

/* Corpus-level inference; masks are written as <out_dir>/<feature stem>.pgm.
   ms_per_image may be NULL. */
PASTA_API pasta_status pasta_infer_patch_corpus(const pasta_model* model,
                                                const pasta_manifest* manifest,
                                                const char* out_dir, double* ms_per_image);
PASTA_API pasta_status pasta_infer_fused_corpus(const pasta_model* model,
                                                const pasta_manifest* manifest,
                                                const char* out_dir, double* ms_per_image);

/* Baseline --------------------------------------------------------------- */

typedef struct pasta_baseline_config {
  uint32_t k_sphere;
  uint32_t k_vote;
  double bag_fraction;
} pasta_baseline_config;

PASTA_API pasta_baseline_config pasta_baseline_config_default(void);
PASTA_API pasta_status pasta_bag_fit(const pasta_manifest* manifest,
                                     const pasta_baseline_config* config, pasta_bag** out);
PASTA_API pasta_status pasta_bag_save(const pasta_bag* bag, const char* path);
PASTA_API pasta_status pasta_bag_load(const char* path, pasta_bag** out);
PASTA_API size_t pasta_bag_size(const pasta_bag* bag);
PASTA_API void pasta_bag_free(pasta_bag* bag);
PASTA_API pasta_status pasta_baseline_infer_corpus(const pasta_bag* bag,
                                                   const pasta_baseline_config* config,
                                                   const pasta_manifest* manifest,
                                                   const char* out_dir);
PASTA_API pasta_status pasta_baseline_sweep(const pasta_manifest* mixed,
                                            const pasta_manifest* test,
                                            const uint32_t* k_spheres, size_t n_k_spheres,
                                            const uint32_t* k_votes, size_t n_k_votes,
                                            double bag_fraction, const char* csv_path);

/* Evaluation ------------------------------------------------------------- */

typedef enum pasta_eval_mode {
  PASTA_EVAL_PATCH = 0,
  PASTA_EVAL_FUSED = 1
} pasta_eval_mode;

typedef struct pasta_iou {
  /* Percent; NaN when the class has an empty union or is not reported. */
  double background;
  double target;
  double anomaly;
  double miou;
} pasta_iou;

PASTA_API pasta_status pasta_eval_rasters(const pasta_raster* pred, const pasta_raster* gt,
                                          pasta_eval_mode mode, pasta_iou* out);
/* csv_path may be NULL. */
PASTA_API pasta_status pasta_eval_directories(const char* pred_dir, const char* gt_dir,
                                              pasta_eval_mode mode, const char* csv_path,
                                              pasta_iou* out);

typedef enum pasta_sweep_mode {
  PASTA_SWEEP_PATCH = 0,
  PASTA_SWEEP_FUSED = 1,
  PASTA_SWEEP_BOTH = 2
} pasta_sweep_mode;

typedef struct pasta_sweep_params {
  pasta_minibatch_config clustering;
  double ratio_threshold;
  double gamma;
} pasta_sweep_params;

PASTA_API pasta_sweep_params pasta_sweep_params_default(void);
/* timing_csv_path may be NULL. */
PASTA_API pasta_status pasta_sweep(const pasta_manifest* mixed,
                                   const pasta_manifest* reference,
                                   const pasta_manifest* test, const uint32_t* ks,
                                   size_t n_ks, const uint64_t* seeds, size_t n_seeds,
                                   pasta_sweep_mode mode, const pasta_sweep_params* params,
                                   const char* csv_path, const char* timing_csv_path);

/* Synthetic corpora ------------------------------------------------------ */

typedef struct pasta_synth_config {
  uint32_t dim;
  uint32_t grid_rows;
  uint32_t grid_cols;
  uint32_t image_height;
  uint32_t image_width;
  uint32_t n_background;
  uint32_t n_target;
  uint32_t n_anomaly;
  double lambda;
  double sigma;
  double delta;
  uint32_t blobs_min;
  uint32_t blobs_max;
  uint32_t blob_size_min;
  uint32_t blob_size_max;
  uint32_t images_mixed;
  uint32_t images_reference;
  uint32_t images_test;
  uint64_t seed;
} pasta_synth_config;

/* The "easy" preset. */
PASTA_API pasta_synth_config pasta_synth_config_default(void);
/* Writes <out_dir>/{mixed,reference,test}.tsv, their image directories and
   truth.csv. */
PASTA_API pasta_status pasta_synth_generate(const pasta_synth_config* config,
                                            const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* PASTA_PASTA_H */
