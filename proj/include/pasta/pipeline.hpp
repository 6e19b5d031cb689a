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

// Corpus-level workflows over manifests: batch inference, directory
// evaluation, K x seed sweeps and the CSV tables they produce. CSV headers
// are fixed; undefined values are written as "NA".

#ifndef PASTA_PIPELINE_HPP
#define PASTA_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pasta/baseline.hpp"
#include "pasta/clustering.hpp"
#include "pasta/distribution.hpp"
#include "pasta/evaluation.hpp"
#include "pasta/segmentation.hpp"
#include "pasta/tensor_io.hpp"

namespace pasta {

// clusterId,mixedProb,refProb,ratio,isAnomaly
std::string histogram_csv(const PastaModel& model);

struct InferenceSummary {
  std::size_t images = 0;
  double ms_per_image = 0.0;
};

// Writes <out>/<feature stem>.pgm per record with classes {0, 2}.
InferenceSummary infer_patch_corpus(const PastaModel& model, const DatasetManifest& manifest,
                                    const std::filesystem::path& out_dir);

// Writes tri-class masks plus <out>/fusion_report.csv
// (image,maskId,areaPx,anomalyFraction,label). Every record needs instances.
InferenceSummary infer_fused_corpus(const PastaModel& model, const DatasetManifest& manifest,
                                    const std::filesystem::path& out_dir);

// Pooled embedding of every instance in the corpus, record order then id order.
EmbeddingSet collect_object_embeddings(const DatasetManifest& manifest);

FeatureBag fit_baseline_bag(const DatasetManifest& manifest, const BaselineConfig& cfg);

// Writes tri-class masks plus <out>/baseline_report.csv
// (image,maskId,areaPx,label).
InferenceSummary infer_baseline_corpus(const FeatureBag& bag, const BaselineConfig& cfg,
                                       const DatasetManifest& manifest,
                                       const std::filesystem::path& out_dir);

struct EvalResult {
  ConfusionCounts counts;
  IoUReport report;
  std::size_t images = 0;
};

// Pairs every <pred>/X.pgm (except *_inst.pgm) with <gt>/X.pgm, falling back
// to <gt>/X_gt.pgm.
EvalResult evaluate_directories(const std::filesystem::path& pred_dir,
                                const std::filesystem::path& gt_dir, EvalMode mode);

// class,tp,fp,fn,iou
std::string eval_csv(const EvalResult& result, EvalMode mode);

// In-memory test corpus with everything scoring needs.
struct LoadedCorpus {
  std::vector<FeatureGrid> grids;
  std::vector<InstanceMaskSet> masks;  // empty sets where a record has none
  std::vector<LabelRaster> instances;  // raw instance rasters behind `masks`
  std::vector<TriClassMask> truth;
  std::vector<ImageRecord> records;
};

LoadedCorpus load_corpus(const DatasetManifest& manifest, bool need_instances);

ConfusionCounts score_patch(const PastaModel& model, const LoadedCorpus& corpus);
ConfusionCounts score_fused(const PastaModel& model, const LoadedCorpus& corpus);
ConfusionCounts score_baseline(const FeatureBag& bag, const BaselineConfig& cfg,
                               const LoadedCorpus& corpus);

enum class SweepMode : std::uint8_t { kPatch, kFused, kBoth };

struct SweepParams {
  MiniBatchConfig clustering;  // seed is overridden per cell
  double ratio_threshold = kDefaultRatioThreshold;
  double gamma = kDefaultGamma;
};

struct SweepCell {
  std::uint32_t k = 0;
  std::uint64_t seed = 0;
  std::optional<IoUReport> patch;
  std::optional<IoUReport> fused;
  double setup_seconds = 0.0;
  std::optional<double> patch_ms_per_image;
  std::optional<double> fused_ms_per_image;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // K-major, then seed
};

SweepResult run_sweep(const DatasetManifest& mixed, const DatasetManifest& reference,
                      const DatasetManifest& test, std::span<const std::uint32_t> ks,
                      std::span<const std::uint64_t> seeds, SweepMode mode,
                      const SweepParams& params);

// kind,K,seed,mode,class,iou,mean,std,n
// "cell" rows carry one fitted (K, seed); "aggregate" rows the per-K
// mean / sample std over seeds.
std::string sweep_csv(const SweepResult& result);
// K,seed,modelSetupSeconds,patchInferMsPerImage,fusedInferMsPerImage
std::string timing_csv(const SweepResult& result);

struct BaselineSweepRow {
  std::uint32_t k_sphere = 0;
  std::uint32_t k_vote = 0;
  IoUReport report;
};

std::vector<BaselineSweepRow> run_baseline_sweep(const DatasetManifest& mixed,
                                                 const DatasetManifest& test,
                                                 std::span<const std::uint32_t> k_spheres,
                                                 std::span<const std::uint32_t> k_votes,
                                                 double bag_fraction);

// kSphere,kVote,iouBackground,iouTarget,iouAnomaly,miou
std::string baseline_sweep_csv(std::span<const BaselineSweepRow> rows);

}  // namespace pasta

#endif  // PASTA_PIPELINE_HPP
