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

// Seeded synthetic corpora with planted Gaussian components.
//
// Component ids are laid out background first, then target, then anomaly.
// Random streams: component means come from stream (seed, "means"); image i
// of a corpus uses its own stream (seed, role, i), consumed in the order
// blob placement, background component choice, per-patch noise.

#ifndef PASTA_SYNTH_HPP
#define PASTA_SYNTH_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pasta/random.hpp"
#include "pasta/tensor_io.hpp"

namespace pasta {

enum class ComponentKind : std::uint8_t { kBackground, kTarget, kAnomaly };

struct SynthConfig {
  std::uint32_t dim = 64;
  std::uint32_t grid_rows = 16;
  std::uint32_t grid_cols = 16;
  std::uint32_t image_height = 64;
  std::uint32_t image_width = 64;
  std::uint32_t n_background = 2;
  std::uint32_t n_target = 2;
  std::uint32_t n_anomaly = 1;
  double lambda = 0.2;  // per-blob anomaly probability
  double sigma = 1.0;
  double delta = 80.0;  // minimum pairwise distance between component means
  std::uint32_t blobs_min = 1;
  std::uint32_t blobs_max = 4;
  std::uint32_t blob_size_min = 2;  // side length in patches
  std::uint32_t blob_size_max = 4;
  std::uint32_t images_mixed = 100;
  std::uint32_t images_reference = 100;
  std::uint32_t images_test = 50;
  std::uint64_t seed = 0;

  std::uint32_t n_components() const { return n_background + n_target + n_anomaly; }
  ComponentKind kind_of(std::uint32_t component) const;
  void validate() const;
};

// d = 64, 16x16 grid, 2 background + 2 target + 1 anomaly components,
// delta = 10 * sigma * sqrt(d), lambda = 0.2, 100/100/50 images.
SynthConfig easy_preset();

struct ComponentSet {
  std::uint32_t dim = 0;
  std::vector<double> means;  // n * dim, every value exactly representable as float
  std::vector<ComponentKind> kinds;

  std::size_t size() const { return kinds.size(); }
  std::span<const double> mean(std::size_t i) const { return {means.data() + i * dim, dim}; }
};

ComponentSet generate_component_means(const SynthConfig& cfg, Rng& rng);
ComponentSet generate_component_means(const SynthConfig& cfg);

struct Blob {
  std::uint32_t row = 0, col = 0, rows = 0, cols = 0;
  std::uint32_t component = 0;
  bool anomaly = false;
};

struct SceneTruth {
  LabelRaster tri_class;
  LabelRaster instances;
  std::vector<std::uint32_t> patch_component;
  std::vector<Blob> blobs;  // instance id = position + 1
};

struct Scene {
  FeatureGrid grid;
  SceneTruth truth;
};

Scene generate_scene(const SynthConfig& cfg, const ComponentSet& components, Rng& rng,
                     bool allow_anomalies);

// Stream for image `index` of the corpus with the given role.
Rng scene_rng(const SynthConfig& cfg, CorpusRole role, std::uint32_t index);

struct CorpusPaths {
  std::filesystem::path mixed;
  std::filesystem::path reference;
  std::filesystem::path test;
  std::filesystem::path truth;
};

// Writes <out>/{mixed,reference,test}/img_NNNNN{.pfv,_inst.pgm,_gt.pgm},
// the three manifests <out>/<role>.tsv and <out>/truth.csv.
CorpusPaths generate_corpus(const SynthConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace pasta

#endif  // PASTA_SYNTH_HPP
