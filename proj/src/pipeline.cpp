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

#include "pasta/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "pasta/error.hpp"
#include "pasta/parallel.hpp"

namespace fs = std::filesystem;

namespace pasta {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string fmt_opt(const std::optional<double>& v, const char* pattern = "{:.4f}") {
  return v ? fmt::format(fmt::runtime(pattern), *v) : std::string("NA");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create directory '" + dir.string() + "'");
}

// Output mask names; duplicates would silently overwrite each other.
std::vector<std::string> output_stems(const DatasetManifest& manifest) {
  std::vector<std::string> stems;
  std::set<std::string> seen;
  for (const auto& rec : manifest.records) {
    std::string stem = rec.features.stem().string();
    if (!seen.insert(stem).second) {
      fail(ErrorCode::kInvalidArgument, "two records share the output name '" + stem + "'");
    }
    stems.push_back(std::move(stem));
  }
  return stems;
}

InstanceMaskSet load_instances(const ImageRecord& rec) {
  if (!rec.instances) {
    fail(ErrorCode::kInvalidArgument,
         "record '" + rec.features.string() + "' has no instance mask");
  }
  return InstanceMaskSet::from_raster(read_label_raster(*rec.instances, RasterKind::kInstance));
}

const char* class_name(std::size_t c) {
  static constexpr const char* kNames[] = {"background", "target", "anomaly"};
  return kNames[c];
}

const char* label_name(std::uint16_t label) { return label == kAnomaly ? "anomaly" : "target"; }

double mean_ms(const std::vector<double>& per_image) {
  double total = 0.0;
  for (double v : per_image) total += v;
  return per_image.empty() ? 0.0 : total / static_cast<double>(per_image.size());
}

}  // namespace

std::string histogram_csv(const PastaModel& model) {
  std::string out = "clusterId,mixedProb,refProb,ratio,isAnomaly\n";
  for (std::uint32_t i = 0; i < model.k(); ++i) {
    out += fmt::format("{},{:.9g},{:.9g},{},{}\n", i, model.mixed.probs[i],
                       model.reference.probs[i],
                       fmt_opt(model.anomalies.ratios[i], "{:.9g}"),
                       model.anomalies.contains(i) ? 1 : 0);
  }
  return out;
}

InferenceSummary infer_patch_corpus(const PastaModel& model, const DatasetManifest& manifest,
                                    const fs::path& out_dir) {
  ensure_dir(out_dir);
  const auto stems = output_stems(manifest);
  std::vector<double> ms(manifest.size());
  parallel_for(manifest.size(), [&](std::size_t i) {
    const ImageRecord& rec = manifest.records[i];
    const auto start = Clock::now();
    const FeatureGrid grid = read_feature_grid(rec.features);
    const TriClassMask pred = patch_prediction(infer_patch_anomaly(model, grid),
                                               rec.image_height, rec.image_width);
    ms[i] = ms_since(start);
    write_label_raster(pred, out_dir / (stems[i] + ".pgm"));
  });
  return {manifest.size(), mean_ms(ms)};
}

InferenceSummary infer_fused_corpus(const PastaModel& model, const DatasetManifest& manifest,
                                    const fs::path& out_dir) {
  ensure_dir(out_dir);
  const auto stems = output_stems(manifest);
  std::vector<double> ms(manifest.size());
  std::vector<std::vector<MaskDecision>> decisions(manifest.size());
  parallel_for(manifest.size(), [&](std::size_t i) {
    const ImageRecord& rec = manifest.records[i];
    const auto start = Clock::now();
    const FeatureGrid grid = read_feature_grid(rec.features);
    const InstanceMaskSet masks = load_instances(rec);
    SegmentationResult result = fuse_masks(model, grid, masks, rec.image_height, rec.image_width);
    ms[i] = ms_since(start);
    write_label_raster(result.mask, out_dir / (stems[i] + ".pgm"));
    decisions[i] = std::move(result.decisions);
  });
  std::string report = "image,maskId,areaPx,anomalyFraction,label\n";
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    for (const auto& d : decisions[i]) {
      report += fmt::format("{},{},{},{:.9g},{}\n", stems[i], d.mask_id, d.area,
                            d.anomaly_fraction, label_name(d.label));
    }
  }
  write_text_atomic(out_dir / "fusion_report.csv", report);
  return {manifest.size(), mean_ms(ms)};
}

EmbeddingSet collect_object_embeddings(const DatasetManifest& manifest) {
  std::vector<EmbeddingSet> per_image(manifest.size());
  parallel_for(manifest.size(), [&](std::size_t i) {
    const ImageRecord& rec = manifest.records[i];
    const FeatureGrid grid = read_feature_grid(rec.features);
    const InstanceMaskSet masks = load_instances(rec);
    per_image[i].dim = grid.dim;
    for (const auto& mask : masks.masks) {
      per_image[i].append(pool_object_embedding(grid, mask, rec.image_height, rec.image_width));
    }
  });
  EmbeddingSet all;
  all.dim = manifest.dim;
  for (const auto& e : per_image) all.append(e.data);
  return all;
}

FeatureBag fit_baseline_bag(const DatasetManifest& manifest, const BaselineConfig& cfg) {
  return build_bag(collect_object_embeddings(manifest), cfg);
}

InferenceSummary infer_baseline_corpus(const FeatureBag& bag, const BaselineConfig& cfg,
                                       const DatasetManifest& manifest,
                                       const fs::path& out_dir) {
  if (manifest.dim != bag.dim) fail(ErrorCode::kDimMismatch, "manifest dim differs from bag dim");
  ensure_dir(out_dir);
  const auto stems = output_stems(manifest);
  std::vector<double> ms(manifest.size());
  std::vector<std::vector<MaskDecision>> decisions(manifest.size());
  parallel_for(manifest.size(), [&](std::size_t i) {
    const ImageRecord& rec = manifest.records[i];
    const auto start = Clock::now();
    const FeatureGrid grid = read_feature_grid(rec.features);
    const InstanceMaskSet masks = load_instances(rec);
    SegmentationResult result =
        baseline_segment(grid, masks, bag, cfg, rec.image_height, rec.image_width);
    ms[i] = ms_since(start);
    write_label_raster(result.mask, out_dir / (stems[i] + ".pgm"));
    decisions[i] = std::move(result.decisions);
  });
  std::string report = "image,maskId,areaPx,label\n";
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    for (const auto& d : decisions[i]) {
      report += fmt::format("{},{},{},{}\n", stems[i], d.mask_id, d.area, label_name(d.label));
    }
  }
  write_text_atomic(out_dir / "baseline_report.csv", report);
  return {manifest.size(), mean_ms(ms)};
}

EvalResult evaluate_directories(const fs::path& pred_dir, const fs::path& gt_dir,
                                EvalMode mode) {
  for (const auto& dir : {pred_dir, gt_dir}) {
    if (!fs::is_directory(dir)) {
      fail(ErrorCode::kMissingFile, "no such directory '" + dir.string() + "'");
    }
  }
  std::vector<fs::path> preds;
  for (const auto& entry : fs::directory_iterator(pred_dir)) {
    const fs::path& p = entry.path();
    if (!entry.is_regular_file() || p.extension() != ".pgm") continue;
    const std::string stem = p.stem().string();
    if (stem.size() >= 5 && stem.compare(stem.size() - 5, 5, "_inst") == 0) continue;
    preds.push_back(p);
  }
  std::sort(preds.begin(), preds.end());
  if (preds.empty()) fail(ErrorCode::kEmptyInput, "no prediction rasters in '" + pred_dir.string() + "'");

  std::vector<ConfusionCounts> per_image(preds.size());
  parallel_for(preds.size(), [&](std::size_t i) {
    fs::path gt = gt_dir / preds[i].filename();
    if (!fs::exists(gt)) gt = gt_dir / (preds[i].stem().string() + "_gt.pgm");
    if (!fs::exists(gt)) {
      fail(ErrorCode::kMissingFile, "no ground truth for '" + preds[i].filename().string() + "'");
    }
    accumulate_confusion(read_label_raster(preds[i], RasterKind::kTriClass),
                         read_label_raster(gt, RasterKind::kTriClass), mode, per_image[i]);
  });
  EvalResult result;
  for (const auto& c : per_image) result.counts += c;
  result.report = iou_report(result.counts, mode);
  result.images = preds.size();
  return result;
}

std::string eval_csv(const EvalResult& result, EvalMode mode) {
  std::string out = "class,tp,fp,fn,iou\n";
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (mode == EvalMode::kPatch && c != kAnomaly) continue;
    out += fmt::format("{},{},{},{},{}\n", class_name(c), result.counts.tp[c],
                       result.counts.fp[c], result.counts.fn[c], fmt_opt(result.report.iou[c]));
  }
  out += fmt::format("miou,,,,{:.4f}\n", result.report.miou);
  return out;
}

LoadedCorpus load_corpus(const DatasetManifest& manifest, bool need_instances) {
  LoadedCorpus corpus;
  const std::size_t n = manifest.size();
  corpus.grids.resize(n);
  corpus.masks.resize(n);
  corpus.instances.resize(n);
  corpus.truth.resize(n);
  corpus.records = manifest.records;
  parallel_for(n, [&](std::size_t i) {
    const ImageRecord& rec = manifest.records[i];
    corpus.grids[i] = read_feature_grid(rec.features);
    if (!rec.ground_truth) {
      fail(ErrorCode::kInvalidArgument,
           "record '" + rec.features.string() + "' has no ground-truth mask");
    }
    corpus.truth[i] = read_label_raster(*rec.ground_truth, RasterKind::kTriClass);
    if (need_instances) {
      if (!rec.instances) {
        fail(ErrorCode::kInvalidArgument,
             "record '" + rec.features.string() + "' has no instance mask");
      }
      corpus.instances[i] = read_label_raster(*rec.instances, RasterKind::kInstance);
      corpus.masks[i] = InstanceMaskSet::from_raster(corpus.instances[i]);
    } else {
      corpus.masks[i].height = rec.image_height;
      corpus.masks[i].width = rec.image_width;
    }
  });
  return corpus;
}

namespace {

template <typename Predict>
ConfusionCounts score(const LoadedCorpus& corpus, EvalMode mode, Predict predict) {
  std::vector<ConfusionCounts> per_image(corpus.grids.size());
  parallel_for(per_image.size(), [&](std::size_t i) {
    accumulate_confusion(predict(i), corpus.truth[i], mode, per_image[i]);
  });
  ConfusionCounts total;
  for (const auto& c : per_image) total += c;
  return total;
}

}  // namespace

ConfusionCounts score_patch(const PastaModel& model, const LoadedCorpus& corpus) {
  return score(corpus, EvalMode::kPatch, [&](std::size_t i) {
    const auto& rec = corpus.records[i];
    return patch_prediction(infer_patch_anomaly(model, corpus.grids[i]), rec.image_height,
                            rec.image_width);
  });
}

ConfusionCounts score_fused(const PastaModel& model, const LoadedCorpus& corpus) {
  return score(corpus, EvalMode::kFused, [&](std::size_t i) {
    const auto& rec = corpus.records[i];
    return fuse_masks(model, corpus.grids[i], corpus.masks[i], rec.image_height,
                      rec.image_width)
        .mask;
  });
}

ConfusionCounts score_baseline(const FeatureBag& bag, const BaselineConfig& cfg,
                               const LoadedCorpus& corpus) {
  return score(corpus, EvalMode::kFused, [&](std::size_t i) {
    const auto& rec = corpus.records[i];
    return baseline_segment(corpus.grids[i], corpus.masks[i], bag, cfg, rec.image_height,
                            rec.image_width)
        .mask;
  });
}

namespace {

std::vector<FeatureGrid> load_grids(const DatasetManifest& manifest) {
  std::vector<FeatureGrid> grids(manifest.size());
  parallel_for(grids.size(), [&](std::size_t i) {
    grids[i] = read_feature_grid(manifest.records[i].features);
  });
  return grids;
}

// Mean over images of the fastest of kTimingRepeats runs per path. Paths are
// interleaved within each repeat so slow drifts in machine load hit all of
// them alike.
constexpr int kTimingRepeats = 7;

std::vector<double> time_per_image(const LoadedCorpus& corpus,
                                   std::span<const std::function<void(std::size_t)>> paths) {
  const std::size_t n = corpus.records.size();
  std::vector<std::vector<double>> ms(paths.size(),
                                      std::vector<double>(n, std::numeric_limits<double>::infinity()));
  for (int rep = 0; rep < kTimingRepeats; ++rep) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t p = 0; p < paths.size(); ++p) {
        const auto start = Clock::now();
        paths[p](i);
        ms[p][i] = std::min(ms[p][i], ms_since(start));
      }
    }
  }
  std::vector<double> out;
  for (const auto& m : ms) out.push_back(mean_ms(m));
  return out;
}

}  // namespace

SweepResult run_sweep(const DatasetManifest& mixed, const DatasetManifest& reference,
                      const DatasetManifest& test, std::span<const std::uint32_t> ks,
                      std::span<const std::uint64_t> seeds, SweepMode mode,
                      const SweepParams& params) {
  if (ks.empty() || seeds.empty()) fail(ErrorCode::kEmptyInput, "sweep needs at least one K and one seed");
  if (mixed.dim != reference.dim || mixed.dim != test.dim) {
    fail(ErrorCode::kDimMismatch, "sweep corpora disagree on embedding dim");
  }
  const bool want_patch = mode != SweepMode::kFused;
  const bool want_fused = mode != SweepMode::kPatch;

  const std::vector<FeatureGrid> mixed_grids = load_grids(mixed);
  const std::vector<FeatureGrid> reference_grids = load_grids(reference);
  FeatureMatrix features;
  features.dim = mixed.dim;
  for (const auto& g : mixed_grids) features.append(g.data);
  const LoadedCorpus corpus = load_corpus(test, want_fused);

  SweepResult result;
  for (std::uint32_t k : ks) {
    for (std::uint64_t seed : seeds) {
      SweepCell cell;
      cell.k = k;
      cell.seed = seed;
      MiniBatchConfig cfg = params.clustering;
      cfg.seed = seed;
      const auto setup_start = Clock::now();
      ClusterCodebook codebook = fit_codebook(features.view(), k, cfg);
      const ClusterDistribution mixed_dist = estimate_distribution(codebook, mixed_grids);
      const ClusterDistribution ref_dist = estimate_distribution(codebook, reference_grids);
      const PastaModel model = build_model(std::move(codebook), mixed_dist, ref_dist,
                                           params.ratio_threshold, params.gamma);
      cell.setup_seconds = ms_since(setup_start) / 1000.0;

      std::vector<std::function<void(std::size_t)>> paths;
      if (want_patch) {
        cell.patch = iou_report(score_patch(model, corpus), EvalMode::kPatch);
        paths.emplace_back([&](std::size_t i) {
          const auto& rec = corpus.records[i];
          patch_prediction(infer_patch_anomaly(model, corpus.grids[i]), rec.image_height,
                           rec.image_width);
        });
      }
      if (want_fused) {
        cell.fused = iou_report(score_fused(model, corpus), EvalMode::kFused);
        paths.emplace_back([&](std::size_t i) {
          const auto& rec = corpus.records[i];
          fuse_masks(model, corpus.grids[i], InstanceMaskSet::from_raster(corpus.instances[i]),
                     rec.image_height, rec.image_width);
        });
      }
      const auto ms = time_per_image(corpus, paths);
      if (want_patch) cell.patch_ms_per_image = ms.front();
      if (want_fused) cell.fused_ms_per_image = ms.back();
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

namespace {

struct ReportColumn {
  const char* name;
  std::optional<double> (*get)(const IoUReport&);
};

const ReportColumn kFusedColumns[] = {
    {"background", [](const IoUReport& r) { return r.iou[kBackground]; }},
    {"target", [](const IoUReport& r) { return r.iou[kTarget]; }},
    {"anomaly", [](const IoUReport& r) { return r.iou[kAnomaly]; }},
    {"miou", [](const IoUReport& r) { return std::optional<double>(r.miou); }},
};
const ReportColumn kPatchColumns[] = {
    {"anomaly", [](const IoUReport& r) { return r.iou[kAnomaly]; }},
};

}  // namespace

std::string sweep_csv(const SweepResult& result) {
  std::string out = "kind,K,seed,mode,class,iou,mean,std,n\n";
  struct ModeView {
    const char* name;
    std::span<const ReportColumn> columns;
    const std::optional<IoUReport> SweepCell::*report;
  };
  const ModeView modes[] = {{"patch", kPatchColumns, &SweepCell::patch},
                            {"fused", kFusedColumns, &SweepCell::fused}};

  for (const auto& cell : result.cells) {
    for (const auto& m : modes) {
      const auto& report = cell.*m.report;
      if (!report) continue;
      for (const auto& col : m.columns) {
        out += fmt::format("cell,{},{},{},{},{},,,\n", cell.k, cell.seed, m.name, col.name,
                           fmt_opt(col.get(*report)));
      }
    }
  }

  std::vector<std::uint32_t> ks;
  for (const auto& cell : result.cells) {
    if (std::find(ks.begin(), ks.end(), cell.k) == ks.end()) ks.push_back(cell.k);
  }
  for (std::uint32_t k : ks) {
    for (const auto& m : modes) {
      for (const auto& col : m.columns) {
        std::vector<double> values;
        bool present = false;
        for (const auto& cell : result.cells) {
          const auto& report = cell.*m.report;
          if (cell.k != k || !report) continue;
          present = true;
          if (auto v = col.get(*report)) values.push_back(*v);
        }
        if (!present) continue;
        if (values.empty()) {
          out += fmt::format("aggregate,{},,{},{},,NA,NA,0\n", k, m.name, col.name);
          continue;
        }
        const SeedAggregate agg = aggregate_seeds(values);
        out += fmt::format("aggregate,{},,{},{},,{:.4f},{:.4f},{}\n", k, m.name, col.name,
                           agg.mean, agg.std, agg.n);
      }
    }
  }
  return out;
}

std::string timing_csv(const SweepResult& result) {
  std::string out = "K,seed,modelSetupSeconds,patchInferMsPerImage,fusedInferMsPerImage\n";
  for (const auto& cell : result.cells) {
    out += fmt::format("{},{},{:.6f},{},{}\n", cell.k, cell.seed, cell.setup_seconds,
                       fmt_opt(cell.patch_ms_per_image, "{:.6f}"),
                       fmt_opt(cell.fused_ms_per_image, "{:.6f}"));
  }
  return out;
}

std::vector<BaselineSweepRow> run_baseline_sweep(const DatasetManifest& mixed,
                                                 const DatasetManifest& test,
                                                 std::span<const std::uint32_t> k_spheres,
                                                 std::span<const std::uint32_t> k_votes,
                                                 double bag_fraction) {
  if (k_spheres.empty() || k_votes.empty()) {
    fail(ErrorCode::kEmptyInput, "baseline sweep needs at least one kSphere and one kVote");
  }
  if (mixed.dim != test.dim) fail(ErrorCode::kDimMismatch, "corpora disagree on embedding dim");
  const EmbeddingSet embeddings = collect_object_embeddings(mixed);
  const LoadedCorpus corpus = load_corpus(test, true);
  std::vector<BaselineSweepRow> rows;
  for (std::uint32_t ks : k_spheres) {
    BaselineConfig cfg;
    cfg.k_sphere = ks;
    cfg.bag_fraction = bag_fraction;
    const FeatureBag bag = build_bag(embeddings, cfg);
    for (std::uint32_t kv : k_votes) {
      cfg.k_vote = kv;
      rows.push_back({ks, kv, iou_report(score_baseline(bag, cfg, corpus))});
    }
  }
  return rows;
}

std::string baseline_sweep_csv(std::span<const BaselineSweepRow> rows) {
  std::string out = "kSphere,kVote,iouBackground,iouTarget,iouAnomaly,miou\n";
  for (const auto& row : rows) {
    out += fmt::format("{},{},{},{},{},{:.4f}\n", row.k_sphere, row.k_vote,
                       fmt_opt(row.report.iou[kBackground]), fmt_opt(row.report.iou[kTarget]),
                       fmt_opt(row.report.iou[kAnomaly]), row.report.miou);
  }
  return out;
}

}  // namespace pasta
