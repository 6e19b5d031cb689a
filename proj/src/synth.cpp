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

#include "pasta/synth.hpp"

#include <cmath>
#include <string>

#include <fmt/format.h>

#include "pasta/error.hpp"
#include "pasta/parallel.hpp"

namespace fs = std::filesystem;

namespace pasta {
namespace {

constexpr std::uint64_t kMeansStream = 0x6d65616e73;  // "means"
constexpr int kMeanTriesPerComponent = 1000;
constexpr int kMeanRestarts = 100;
constexpr int kBlobTries = 200;

std::uint64_t role_stream(CorpusRole role) {
  return 0x726f6c65'00000000ULL + static_cast<std::uint64_t>(role);
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(s);
}

}  // namespace

ComponentKind SynthConfig::kind_of(std::uint32_t component) const {
  if (component < n_background) return ComponentKind::kBackground;
  if (component < n_background + n_target) return ComponentKind::kTarget;
  return ComponentKind::kAnomaly;
}

void SynthConfig::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorCode::kInvalidArgument, what); };
  if (dim < 2) bad("synthetic embeddings need dim >= 2");
  if (grid_rows == 0 || grid_cols == 0) bad("grid dimensions must be positive");
  if (image_height < grid_rows || image_width < grid_cols) {
    bad("image must be at least as large as the patch grid");
  }
  if (n_background == 0) bad("at least one background component is required");
  if (n_target == 0) bad("at least one target component is required");
  if (!(delta > 0.0)) bad("delta must be positive");
  if (!(sigma >= 0.0)) bad("sigma must be non-negative");
  if (!(lambda >= 0.0 && lambda <= 1.0)) bad("lambda must lie in [0, 1]");
  if (lambda > 0.0 && n_anomaly == 0) bad("lambda > 0 requires an anomaly component");
  if (blobs_min > blobs_max) bad("blobs_min exceeds blobs_max");
  if (blob_size_min == 0 || blob_size_min > blob_size_max) bad("bad blob size range");
  if (blob_size_max > grid_rows || blob_size_max > grid_cols) {
    bad("blobs cannot be larger than the grid");
  }
  if (images_mixed == 0 || images_reference == 0 || images_test == 0) {
    bad("every corpus needs at least one image");
  }
}

SynthConfig easy_preset() {
  SynthConfig cfg;
  cfg.delta = 10.0 * cfg.sigma * std::sqrt(static_cast<double>(cfg.dim));
  return cfg;
}

ComponentSet generate_component_means(const SynthConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::uint32_t n = cfg.n_components();
  ComponentSet set;
  set.dim = cfg.dim;
  for (std::uint32_t c = 0; c < n; ++c) set.kinds.push_back(cfg.kind_of(c));

  // Points on a sphere whose radius leaves room for n well-spread means.
  const double radius = cfg.delta * std::sqrt(static_cast<double>(n));
  std::vector<double> candidate(cfg.dim);
  for (int restart = 0; restart < kMeanRestarts; ++restart) {
    set.means.clear();
    bool placed_all = true;
    for (std::uint32_t c = 0; c < n && placed_all; ++c) {
      bool placed = false;
      for (int t = 0; t < kMeanTriesPerComponent && !placed; ++t) {
        double norm = 0.0;
        for (auto& v : candidate) {
          v = rng.normal();
          norm += v * v;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        for (auto& v : candidate) {
          v = static_cast<double>(static_cast<float>(v / norm * radius));
        }
        placed = true;
        for (std::uint32_t prev = 0; prev < c && placed; ++prev) {
          if (distance(candidate, set.mean(prev)) < cfg.delta) placed = false;
        }
      }
      if (placed) {
        set.means.insert(set.means.end(), candidate.begin(), candidate.end());
      } else {
        placed_all = false;
      }
    }
    if (placed_all) return set;
  }
  fail(ErrorCode::kPlacementFailure,
       "could not place " + std::to_string(n) + " component means at distance >= " +
           std::to_string(cfg.delta));
}

ComponentSet generate_component_means(const SynthConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, kMeansStream, 0));
  return generate_component_means(cfg, rng);
}

Rng scene_rng(const SynthConfig& cfg, CorpusRole role, std::uint32_t index) {
  return Rng(derive_seed(cfg.seed, role_stream(role), index));
}

Scene generate_scene(const SynthConfig& cfg, const ComponentSet& components, Rng& rng,
                     bool allow_anomalies) {
  if (components.size() != cfg.n_components() || components.dim != cfg.dim) {
    fail(ErrorCode::kInvalidArgument, "component set does not match the config");
  }
  const std::uint32_t rows = cfg.grid_rows;
  const std::uint32_t cols = cfg.grid_cols;
  const std::size_t n_patches = static_cast<std::size_t>(rows) * cols;

  // Blob placement. owner[p] = blob index + 1, or 0 for background.
  Scene scene;
  std::vector<std::uint32_t> owner(n_patches, 0);
  const auto n_blobs =
      static_cast<std::uint32_t>(rng.uniform_int(cfg.blobs_min, cfg.blobs_max));
  for (std::uint32_t b = 0; b < n_blobs; ++b) {
    Blob blob;
    bool placed = false;
    for (int t = 0; t < kBlobTries && !placed; ++t) {
      blob.rows = static_cast<std::uint32_t>(rng.uniform_int(cfg.blob_size_min, cfg.blob_size_max));
      blob.cols = static_cast<std::uint32_t>(rng.uniform_int(cfg.blob_size_min, cfg.blob_size_max));
      blob.row = static_cast<std::uint32_t>(rng.uniform_index(rows - blob.rows + 1));
      blob.col = static_cast<std::uint32_t>(rng.uniform_index(cols - blob.cols + 1));
      placed = true;
      for (std::uint32_t r = blob.row; r < blob.row + blob.rows && placed; ++r) {
        for (std::uint32_t c = blob.col; c < blob.col + blob.cols; ++c) {
          if (owner[r * cols + c] != 0) {
            placed = false;
            break;
          }
        }
      }
    }
    if (!placed) {
      fail(ErrorCode::kPlacementFailure, "could not place blob " + std::to_string(b + 1) +
                                             " without overlap");
    }
    blob.anomaly = allow_anomalies && cfg.n_anomaly > 0 && rng.bernoulli(cfg.lambda);
    if (blob.anomaly) {
      blob.component = cfg.n_background + cfg.n_target +
                       static_cast<std::uint32_t>(rng.uniform_index(cfg.n_anomaly));
    } else {
      blob.component =
          cfg.n_background + static_cast<std::uint32_t>(rng.uniform_index(cfg.n_target));
    }
    for (std::uint32_t r = blob.row; r < blob.row + blob.rows; ++r) {
      for (std::uint32_t c = blob.col; c < blob.col + blob.cols; ++c) owner[r * cols + c] = b + 1;
    }
    scene.truth.blobs.push_back(blob);
  }

  auto& component = scene.truth.patch_component;
  component.resize(n_patches);
  for (std::size_t p = 0; p < n_patches; ++p) {
    component[p] = owner[p] != 0
                       ? scene.truth.blobs[owner[p] - 1].component
                       : static_cast<std::uint32_t>(rng.uniform_index(cfg.n_background));
  }

  FeatureGrid& grid = scene.grid;
  grid.rows = rows;
  grid.cols = cols;
  grid.dim = cfg.dim;
  grid.data.resize(n_patches * cfg.dim);
  for (std::size_t p = 0; p < n_patches; ++p) {
    const auto mean = components.mean(component[p]);
    for (std::uint32_t j = 0; j < cfg.dim; ++j) {
      grid.data[p * cfg.dim + j] = static_cast<float>(mean[j] + cfg.sigma * rng.normal());
    }
  }

  const std::uint32_t h = cfg.image_height;
  const std::uint32_t w = cfg.image_width;
  scene.truth.tri_class = LabelRaster(h, w, RasterKind::kTriClass);
  scene.truth.instances = LabelRaster(h, w, RasterKind::kInstance);
  for (std::uint64_t y = 0; y < h; ++y) {
    for (std::uint64_t x = 0; x < w; ++x) {
      const std::size_t p = static_cast<std::size_t>(y * rows / h) * cols +
                            static_cast<std::size_t>(x * cols / w);
      const std::uint32_t blob = owner[p];
      std::uint16_t cls = kBackground;
      if (blob != 0) cls = scene.truth.blobs[blob - 1].anomaly ? kAnomaly : kTarget;
      scene.truth.tri_class.at(y, x) = cls;
      scene.truth.instances.at(y, x) = static_cast<std::uint16_t>(blob);
    }
  }
  return scene;
}

CorpusPaths generate_corpus(const SynthConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  const ComponentSet components = generate_component_means(cfg);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create " + out_dir.string());

  struct Corpus {
    CorpusRole role;
    std::uint32_t images;
    bool anomalies;
  };
  const Corpus corpora[] = {{CorpusRole::kMixed, cfg.images_mixed, true},
                            {CorpusRole::kReference, cfg.images_reference, false},
                            {CorpusRole::kTest, cfg.images_test, true}};
  CorpusPaths paths;
  for (const auto& corpus : corpora) {
    const std::string name(role_name(corpus.role));
    const fs::path dir = out_dir / name;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorCode::kIo, "cannot create " + dir.string());

    DatasetManifest manifest;
    manifest.role = corpus.role;
    manifest.dim = cfg.dim;
    manifest.records.resize(corpus.images);
    parallel_for(corpus.images, [&](std::size_t i) {
      Rng rng = scene_rng(cfg, corpus.role, static_cast<std::uint32_t>(i));
      const Scene scene = generate_scene(cfg, components, rng, corpus.anomalies);
      const std::string stem = fmt::format("img_{:05d}", i);
      ImageRecord rec;
      rec.features = dir / (stem + ".pfv");
      rec.instances = dir / (stem + "_inst.pgm");
      rec.ground_truth = dir / (stem + "_gt.pgm");
      rec.image_height = cfg.image_height;
      rec.image_width = cfg.image_width;
      write_feature_grid(scene.grid, rec.features);
      write_label_raster(scene.truth.instances, *rec.instances);
      write_label_raster(scene.truth.tri_class, *rec.ground_truth);
      manifest.records[i] = std::move(rec);
    });
    const fs::path manifest_path = out_dir / (name + ".tsv");
    write_manifest(manifest, manifest_path, out_dir);
    switch (corpus.role) {
      case CorpusRole::kMixed: paths.mixed = manifest_path; break;
      case CorpusRole::kReference: paths.reference = manifest_path; break;
      case CorpusRole::kTest: paths.test = manifest_path; break;
    }
  }

  std::string truth = "componentId,kind";
  for (std::uint32_t j = 0; j < cfg.dim; ++j) truth += fmt::format(",m{}", j);
  truth += '\n';
  for (std::size_t c = 0; c < components.size(); ++c) {
    static constexpr const char* kKindNames[] = {"background", "target", "anomaly"};
    truth += fmt::format("{},{}", c, kKindNames[static_cast<int>(components.kinds[c])]);
    for (double v : components.mean(c)) truth += fmt::format(",{:.9g}", v);
    truth += '\n';
  }
  paths.truth = out_dir / "truth.csv";
  write_text_atomic(paths.truth, truth);
  return paths;
}

}  // namespace pasta
