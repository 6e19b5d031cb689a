// Copyright 2026 The PASTA Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pasta/pasta.h"

#include <cmath>
#include <exception>
#include <limits>
#include <new>
#include <string>
#include <vector>

#include "pasta/baseline.hpp"
#include "pasta/clustering.hpp"
#include "pasta/distribution.hpp"
#include "pasta/error.hpp"
#include "pasta/evaluation.hpp"
#include "pasta/model_io.hpp"
#include "pasta/parallel.hpp"
#include "pasta/pipeline.hpp"
#include "pasta/segmentation.hpp"
#include "pasta/synth.hpp"
#include "pasta/tensor_io.hpp"

struct pasta_grid {
  pasta::FeatureGrid value;
};
struct pasta_raster {
  pasta::LabelRaster value;
};
struct pasta_manifest {
  pasta::DatasetManifest value;
};
struct pasta_codebook {
  pasta::ClusterCodebook value;
};
struct pasta_model {
  pasta::PastaModel value;
};
struct pasta_bag {
  pasta::FeatureBag value;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
pasta_status guard(F&& body) noexcept {
  try {
    body();
    g_last_error.clear();
    return PASTA_OK;
  } catch (const pasta::Error& e) {
    g_last_error = e.what();
    return static_cast<pasta_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return PASTA_ERR_INTERNAL;
}

template <typename... Ptrs>
void require(const Ptrs*... ptrs) {
  if (((ptrs == nullptr) || ...)) {
    pasta::fail(pasta::ErrorCode::kInvalidArgument, "required argument is NULL");
  }
}

pasta::MiniBatchConfig to_cpp(const pasta_minibatch_config& c) {
  pasta::MiniBatchConfig cfg;
  cfg.batch_size = c.batch_size;
  cfg.max_epochs = c.max_epochs;
  cfg.tol = c.tol;
  cfg.init_sample_size = c.init_sample_size;
  cfg.seed = c.seed;
  return cfg;
}

pasta::BaselineConfig to_cpp(const pasta_baseline_config& c) {
  return {c.k_sphere, c.k_vote, c.bag_fraction};
}

pasta::SynthConfig to_cpp(const pasta_synth_config& c) {
  pasta::SynthConfig cfg;
  cfg.dim = c.dim;
  cfg.grid_rows = c.grid_rows;
  cfg.grid_cols = c.grid_cols;
  cfg.image_height = c.image_height;
  cfg.image_width = c.image_width;
  cfg.n_background = c.n_background;
  cfg.n_target = c.n_target;
  cfg.n_anomaly = c.n_anomaly;
  cfg.lambda = c.lambda;
  cfg.sigma = c.sigma;
  cfg.delta = c.delta;
  cfg.blobs_min = c.blobs_min;
  cfg.blobs_max = c.blobs_max;
  cfg.blob_size_min = c.blob_size_min;
  cfg.blob_size_max = c.blob_size_max;
  cfg.images_mixed = c.images_mixed;
  cfg.images_reference = c.images_reference;
  cfg.images_test = c.images_test;
  cfg.seed = c.seed;
  return cfg;
}

pasta::EvalMode to_cpp(pasta_eval_mode mode) {
  switch (mode) {
    case PASTA_EVAL_PATCH: return pasta::EvalMode::kPatch;
    case PASTA_EVAL_FUSED: return pasta::EvalMode::kFused;
  }
  pasta::fail(pasta::ErrorCode::kInvalidArgument, "unknown evaluation mode");
}

pasta_iou to_c(const pasta::IoUReport& r) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return {r.iou[0].value_or(nan), r.iou[1].value_or(nan), r.iou[2].value_or(nan), r.miou};
}

template <typename Handle, typename T>
void emit(Handle** out, T&& value) {
  *out = new Handle{std::forward<T>(value)};
}

}  // namespace

extern "C" {

const char* pasta_version(void) { return "1.0.0"; }

const char* pasta_status_name(pasta_status status) {
  static thread_local std::string name;
  name = std::string(pasta::error_code_name(static_cast<pasta::ErrorCode>(status)));
  return name.c_str();
}

int pasta_status_is_io(pasta_status status) {
  return pasta::is_io_error(static_cast<pasta::ErrorCode>(status)) ? 1 : 0;
}

const char* pasta_last_error(void) { return g_last_error.c_str(); }

void pasta_set_threads(int threads) { pasta::set_thread_count(threads); }
int pasta_get_threads(void) { return pasta::thread_count(); }
void pasta_set_warnings(int enabled) { pasta::set_warnings_enabled(enabled != 0); }

// Feature grids

pasta_status pasta_grid_create(uint32_t rows, uint32_t cols, uint32_t dim, const float* data,
                               pasta_grid** out) {
  return guard([&] {
    require(data, out);
    pasta::FeatureGrid grid;
    grid.rows = rows;
    grid.cols = cols;
    grid.dim = dim;
    grid.data.assign(data, data + static_cast<std::size_t>(rows) * cols * dim);
    grid.validate();
    emit(out, std::move(grid));
  });
}

pasta_status pasta_grid_read(const char* path, pasta_grid** out) {
  return guard([&] {
    require(path, out);
    emit(out, pasta::read_feature_grid(path));
  });
}

pasta_status pasta_grid_write(const pasta_grid* grid, const char* path) {
  return guard([&] {
    require(grid, path);
    pasta::write_feature_grid(grid->value, path);
  });
}

void pasta_grid_shape(const pasta_grid* grid, uint32_t* rows, uint32_t* cols, uint32_t* dim) {
  if (!grid) return;
  if (rows) *rows = grid->value.rows;
  if (cols) *cols = grid->value.cols;
  if (dim) *dim = grid->value.dim;
}

const float* pasta_grid_data(const pasta_grid* grid) {
  return grid ? grid->value.data.data() : nullptr;
}

void pasta_grid_free(pasta_grid* grid) { delete grid; }

// Label rasters

pasta_status pasta_raster_create(uint32_t height, uint32_t width, pasta_raster_kind kind,
                                 const uint16_t* values, pasta_raster** out) {
  return guard([&] {
    require(values, out);
    if (height == 0 || width == 0) {
      pasta::fail(pasta::ErrorCode::kBadDims, "raster dimensions must be positive");
    }
    const auto k = kind == PASTA_RASTER_INSTANCE ? pasta::RasterKind::kInstance
                                                 : pasta::RasterKind::kTriClass;
    pasta::LabelRaster raster(height, width, k);
    raster.values.assign(values, values + raster.size());
    if (k == pasta::RasterKind::kTriClass) pasta::validate_tri_class(raster);
    emit(out, std::move(raster));
  });
}

pasta_status pasta_raster_read(const char* path, pasta_raster_kind kind, pasta_raster** out) {
  return guard([&] {
    require(path, out);
    emit(out, pasta::read_label_raster(path, kind == PASTA_RASTER_INSTANCE
                                                 ? pasta::RasterKind::kInstance
                                                 : pasta::RasterKind::kTriClass));
  });
}

pasta_status pasta_raster_write(const pasta_raster* raster, const char* path) {
  return guard([&] {
    require(raster, path);
    pasta::write_label_raster(raster->value, path);
  });
}

void pasta_raster_shape(const pasta_raster* raster, uint32_t* height, uint32_t* width) {
  if (!raster) return;
  if (height) *height = raster->value.height;
  if (width) *width = raster->value.width;
}

const uint16_t* pasta_raster_data(const pasta_raster* raster) {
  return raster ? raster->value.values.data() : nullptr;
}

void pasta_raster_free(pasta_raster* raster) { delete raster; }

// Manifests

pasta_status pasta_manifest_read(const char* path, pasta_manifest** out) {
  return guard([&] {
    require(path, out);
    emit(out, pasta::read_manifest(path));
  });
}

size_t pasta_manifest_size(const pasta_manifest* manifest) {
  return manifest ? manifest->value.size() : 0;
}

uint32_t pasta_manifest_dim(const pasta_manifest* manifest) {
  return manifest ? manifest->value.dim : 0;
}

void pasta_manifest_free(pasta_manifest* manifest) { delete manifest; }

// Clustering

pasta_minibatch_config pasta_minibatch_config_default(void) {
  const pasta::MiniBatchConfig d;
  return {d.batch_size, d.max_epochs, d.tol, d.init_sample_size, d.seed};
}

pasta_status pasta_codebook_fit(const pasta_manifest* mixed, uint32_t k,
                                const pasta_minibatch_config* config, pasta_codebook** out) {
  return guard([&] {
    require(mixed, out);
    const pasta::MiniBatchConfig cfg =
        config ? to_cpp(*config) : pasta::MiniBatchConfig{};
    const pasta::FeatureMatrix features = pasta::gather_features(mixed->value);
    emit(out, pasta::fit_codebook(features.view(), k, cfg));
  });
}

pasta_status pasta_codebook_save(const pasta_codebook* codebook, const char* path) {
  return guard([&] {
    require(codebook, path);
    pasta::save_codebook(codebook->value, path);
  });
}

pasta_status pasta_codebook_load(const char* path, pasta_codebook** out) {
  return guard([&] {
    require(path, out);
    emit(out, pasta::load_codebook(path));
  });
}

uint32_t pasta_codebook_k(const pasta_codebook* codebook) {
  return codebook ? codebook->value.k : 0;
}

uint32_t pasta_codebook_dim(const pasta_codebook* codebook) {
  return codebook ? codebook->value.dim : 0;
}

const double* pasta_codebook_centroids(const pasta_codebook* codebook) {
  return codebook ? codebook->value.centroids.data() : nullptr;
}

pasta_status pasta_codebook_assign(const pasta_codebook* codebook, const float* vector,
                                   uint32_t dim, uint32_t* cluster) {
  return guard([&] {
    require(codebook, vector, cluster);
    *cluster = pasta::assign(codebook->value, std::span<const float>(vector, dim));
  });
}

void pasta_codebook_free(pasta_codebook* codebook) { delete codebook; }

// Models

pasta_status pasta_model_build(const pasta_codebook* codebook, const pasta_manifest* mixed,
                               const pasta_manifest* reference, double ratio_threshold,
                               double gamma, pasta_model** out) {
  return guard([&] {
    require(codebook, mixed, reference, out);
    emit(out, pasta::build_model(codebook->value, mixed->value, reference->value,
                                 ratio_threshold, gamma));
  });
}

pasta_status pasta_model_save(const pasta_model* model, const char* path) {
  return guard([&] {
    require(model, path);
    pasta::save_model(model->value, path);
  });
}

pasta_status pasta_model_load(const char* path, pasta_model** out) {
  return guard([&] {
    require(path, out);
    emit(out, pasta::load_model(path));
  });
}

uint32_t pasta_model_k(const pasta_model* model) { return model ? model->value.k() : 0; }

double pasta_model_gamma(const pasta_model* model) {
  return model ? model->value.gamma : std::numeric_limits<double>::quiet_NaN();
}

int pasta_model_is_anomaly(const pasta_model* model, uint32_t cluster) {
  return model && model->value.anomalies.contains(cluster) ? 1 : 0;
}

int pasta_model_ratio(const pasta_model* model, uint32_t cluster, double* ratio) {
  if (!model || cluster >= model->value.k()) return 0;
  const auto& r = model->value.anomalies.ratios[cluster];
  if (!r) return 0;
  if (ratio) *ratio = *r;
  return 1;
}

pasta_status pasta_model_write_histogram(const pasta_model* model, const char* csv_path) {
  return guard([&] {
    require(model, csv_path);
    pasta::write_text_atomic(csv_path, pasta::histogram_csv(model->value));
  });
}

void pasta_model_free(pasta_model* model) { delete model; }

// Inference

pasta_status pasta_infer_patch(const pasta_model* model, const pasta_grid* grid,
                               uint32_t height, uint32_t width, pasta_raster** out) {
  return guard([&] {
    require(model, grid, out);
    emit(out, pasta::patch_prediction(pasta::infer_patch_anomaly(model->value, grid->value),
                                      height, width));
  });
}

pasta_status pasta_infer_fused(const pasta_model* model, const pasta_grid* grid,
                               const pasta_raster* instances, pasta_raster** out) {
  return guard([&] {
    require(model, grid, instances, out);
    const auto masks = pasta::InstanceMaskSet::from_raster(instances->value);
    emit(out, pasta::fuse_masks(model->value, grid->value, masks, instances->value.height,
                                instances->value.width)
                  .mask);
  });
}

pasta_status pasta_infer_patch_corpus(const pasta_model* model, const pasta_manifest* manifest,
                                      const char* out_dir, double* ms_per_image) {
  return guard([&] {
    require(model, manifest, out_dir);
    const auto summary = pasta::infer_patch_corpus(model->value, manifest->value, out_dir);
    if (ms_per_image) *ms_per_image = summary.ms_per_image;
  });
}

pasta_status pasta_infer_fused_corpus(const pasta_model* model, const pasta_manifest* manifest,
                                      const char* out_dir, double* ms_per_image) {
  return guard([&] {
    require(model, manifest, out_dir);
    const auto summary = pasta::infer_fused_corpus(model->value, manifest->value, out_dir);
    if (ms_per_image) *ms_per_image = summary.ms_per_image;
  });
}

// Baseline

pasta_baseline_config pasta_baseline_config_default(void) {
  const pasta::BaselineConfig d;
  return {d.k_sphere, d.k_vote, d.bag_fraction};
}

pasta_status pasta_bag_fit(const pasta_manifest* manifest, const pasta_baseline_config* config,
                           pasta_bag** out) {
  return guard([&] {
    require(manifest, out);
    const pasta::BaselineConfig cfg = config ? to_cpp(*config) : pasta::BaselineConfig{};
    emit(out, pasta::fit_baseline_bag(manifest->value, cfg));
  });
}

pasta_status pasta_bag_save(const pasta_bag* bag, const char* path) {
  return guard([&] {
    require(bag, path);
    pasta::save_bag(bag->value, path);
  });
}

pasta_status pasta_bag_load(const char* path, pasta_bag** out) {
  return guard([&] {
    require(path, out);
    emit(out, pasta::load_bag(path));
  });
}

size_t pasta_bag_size(const pasta_bag* bag) { return bag ? bag->value.size() : 0; }

void pasta_bag_free(pasta_bag* bag) { delete bag; }

pasta_status pasta_baseline_infer_corpus(const pasta_bag* bag,
                                         const pasta_baseline_config* config,
                                         const pasta_manifest* manifest, const char* out_dir) {
  return guard([&] {
    require(bag, manifest, out_dir);
    const pasta::BaselineConfig cfg = config ? to_cpp(*config) : pasta::BaselineConfig{};
    pasta::infer_baseline_corpus(bag->value, cfg, manifest->value, out_dir);
  });
}

pasta_status pasta_baseline_sweep(const pasta_manifest* mixed, const pasta_manifest* test,
                                  const uint32_t* k_spheres, size_t n_k_spheres,
                                  const uint32_t* k_votes, size_t n_k_votes,
                                  double bag_fraction, const char* csv_path) {
  return guard([&] {
    require(mixed, test, k_spheres, k_votes, csv_path);
    const auto rows = pasta::run_baseline_sweep(
        mixed->value, test->value, std::span<const uint32_t>(k_spheres, n_k_spheres),
        std::span<const uint32_t>(k_votes, n_k_votes), bag_fraction);
    pasta::write_text_atomic(csv_path, pasta::baseline_sweep_csv(rows));
  });
}

// Evaluation

pasta_status pasta_eval_rasters(const pasta_raster* pred, const pasta_raster* gt,
                                pasta_eval_mode mode, pasta_iou* out) {
  return guard([&] {
    require(pred, gt, out);
    const auto m = to_cpp(mode);
    pasta::ConfusionCounts counts;
    pasta::accumulate_confusion(pred->value, gt->value, m, counts);
    *out = to_c(pasta::iou_report(counts, m));
  });
}

pasta_status pasta_eval_directories(const char* pred_dir, const char* gt_dir,
                                    pasta_eval_mode mode, const char* csv_path,
                                    pasta_iou* out) {
  return guard([&] {
    require(pred_dir, gt_dir);
    const auto m = to_cpp(mode);
    const auto result = pasta::evaluate_directories(pred_dir, gt_dir, m);
    if (csv_path) pasta::write_text_atomic(csv_path, pasta::eval_csv(result, m));
    if (out) *out = to_c(result.report);
  });
}

pasta_sweep_params pasta_sweep_params_default(void) {
  return {pasta_minibatch_config_default(), pasta::kDefaultRatioThreshold,
          pasta::kDefaultGamma};
}

pasta_status pasta_sweep(const pasta_manifest* mixed, const pasta_manifest* reference,
                         const pasta_manifest* test, const uint32_t* ks, size_t n_ks,
                         const uint64_t* seeds, size_t n_seeds, pasta_sweep_mode mode,
                         const pasta_sweep_params* params, const char* csv_path,
                         const char* timing_csv_path) {
  return guard([&] {
    require(mixed, reference, test, ks, seeds, csv_path);
    pasta::SweepParams p;
    if (params) {
      p.clustering = to_cpp(params->clustering);
      p.ratio_threshold = params->ratio_threshold;
      p.gamma = params->gamma;
    }
    pasta::SweepMode m;
    switch (mode) {
      case PASTA_SWEEP_PATCH: m = pasta::SweepMode::kPatch; break;
      case PASTA_SWEEP_FUSED: m = pasta::SweepMode::kFused; break;
      case PASTA_SWEEP_BOTH: m = pasta::SweepMode::kBoth; break;
      default: pasta::fail(pasta::ErrorCode::kInvalidArgument, "unknown sweep mode");
    }
    const auto result = pasta::run_sweep(mixed->value, reference->value, test->value,
                                         std::span<const uint32_t>(ks, n_ks),
                                         std::span<const uint64_t>(seeds, n_seeds), m, p);
    pasta::write_text_atomic(csv_path, pasta::sweep_csv(result));
    if (timing_csv_path) pasta::write_text_atomic(timing_csv_path, pasta::timing_csv(result));
  });
}

// Synthetic corpora

pasta_synth_config pasta_synth_config_default(void) {
  const pasta::SynthConfig d = pasta::easy_preset();
  return {d.dim,          d.grid_rows,       d.grid_cols,        d.image_height,
          d.image_width,  d.n_background,    d.n_target,         d.n_anomaly,
          d.lambda,       d.sigma,           d.delta,            d.blobs_min,
          d.blobs_max,    d.blob_size_min,   d.blob_size_max,    d.images_mixed,
          d.images_reference, d.images_test, d.seed};
}

pasta_status pasta_synth_generate(const pasta_synth_config* config, const char* out_dir) {
  return guard([&] {
    require(config, out_dir);
    pasta::generate_corpus(to_cpp(*config), out_dir);
  });
}

}  // extern "C"
