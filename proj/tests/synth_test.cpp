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
#include <set>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace {

using pasta::ComponentKind;
using pasta::CorpusRole;
using pasta::ErrorCode;
using pasta::SynthConfig;

SynthConfig small_config() {
  SynthConfig cfg;
  cfg.dim = 8;
  cfg.grid_rows = 8;
  cfg.grid_cols = 8;
  cfg.image_height = 32;
  cfg.image_width = 24;
  cfg.sigma = 1.0;
  cfg.delta = 10.0 * std::sqrt(8.0);
  cfg.images_mixed = 6;
  cfg.images_reference = 4;
  cfg.images_test = 3;
  cfg.seed = 11;
  return cfg;
}

double mean_distance(const pasta::ComponentSet& set, std::size_t a, std::size_t b) {
  double s = 0;
  for (std::uint32_t j = 0; j < set.dim; ++j) {
    const double d = set.mean(a)[j] - set.mean(b)[j];
    s += d * d;
  }
  return std::sqrt(s);
}

TEST(SynthConfig, EasyPreset) {
  const auto cfg = pasta::easy_preset();
  EXPECT_EQ(cfg.dim, 64u);
  EXPECT_EQ(cfg.grid_rows, 16u);
  EXPECT_EQ(cfg.n_components(), 5u);
  EXPECT_DOUBLE_EQ(cfg.delta, 80.0);
  EXPECT_EQ(cfg.kind_of(0), ComponentKind::kBackground);
  EXPECT_EQ(cfg.kind_of(2), ComponentKind::kTarget);
  EXPECT_EQ(cfg.kind_of(4), ComponentKind::kAnomaly);
}

TEST(SynthConfig, RejectsBadParameters) {
  auto cfg = small_config();
  cfg.delta = 0;
  EXPECT_PASTA_ERROR(cfg.validate(), ErrorCode::kInvalidArgument);
  cfg = small_config();
  cfg.delta = -1;
  EXPECT_PASTA_ERROR(cfg.validate(), ErrorCode::kInvalidArgument);
  cfg = small_config();
  cfg.lambda = 1.5;
  EXPECT_PASTA_ERROR(cfg.validate(), ErrorCode::kInvalidArgument);
  cfg = small_config();
  cfg.blob_size_max = 9;
  EXPECT_PASTA_ERROR(cfg.validate(), ErrorCode::kInvalidArgument);
  cfg = small_config();
  cfg.image_height = 4;
  EXPECT_PASTA_ERROR(cfg.validate(), ErrorCode::kInvalidArgument);
}

TEST(ComponentMeans, PairwiseSeparation) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto cfg = small_config();
    cfg.seed = seed;
    const auto set = pasta::generate_component_means(cfg);
    ASSERT_EQ(set.size(), cfg.n_components());
    for (std::size_t a = 0; a < set.size(); ++a) {
      for (std::size_t b = a + 1; b < set.size(); ++b) {
        EXPECT_GE(mean_distance(set, a, b), cfg.delta);
      }
    }
  }
}

TEST(ComponentMeans, ImpossibleSeparationFails) {
  auto cfg = small_config();
  cfg.dim = 2;
  cfg.n_background = 30;
  cfg.n_target = 30;
  EXPECT_PASTA_ERROR(pasta::generate_component_means(cfg), ErrorCode::kPlacementFailure);
}

TEST(GenerateScene, ZeroSigmaReproducesMeans) {
  auto cfg = small_config();
  cfg.sigma = 0;
  const auto set = pasta::generate_component_means(cfg);
  auto rng = pasta::scene_rng(cfg, CorpusRole::kMixed, 0);
  const auto scene = pasta::generate_scene(cfg, set, rng, true);
  for (std::size_t p = 0; p < scene.grid.patch_count(); ++p) {
    const auto mean = set.mean(scene.truth.patch_component[p]);
    for (std::uint32_t j = 0; j < cfg.dim; ++j) {
      EXPECT_EQ(static_cast<double>(scene.grid.patch(p)[j]), mean[j]);
    }
  }
}

TEST(GenerateScene, ZeroLambdaHasNoAnomalies) {
  auto cfg = small_config();
  cfg.lambda = 0;
  const auto set = pasta::generate_component_means(cfg);
  for (std::uint32_t i = 0; i < 20; ++i) {
    auto rng = pasta::scene_rng(cfg, CorpusRole::kTest, i);
    const auto scene = pasta::generate_scene(cfg, set, rng, true);
    for (auto v : scene.truth.tri_class.values) EXPECT_NE(v, pasta::kAnomaly);
    for (const auto& b : scene.truth.blobs) EXPECT_FALSE(b.anomaly);
  }
}

TEST(GenerateScene, LabelsAlignWithPatches) {
  auto cfg = small_config();
  cfg.lambda = 0.5;
  const auto set = pasta::generate_component_means(cfg);
  for (std::uint32_t i = 0; i < 10; ++i) {
    auto rng = pasta::scene_rng(cfg, CorpusRole::kMixed, i);
    const auto scene = pasta::generate_scene(cfg, set, rng, true);
    const auto& t = scene.truth;
    EXPECT_GE(t.blobs.size(), cfg.blobs_min);
    EXPECT_LE(t.blobs.size(), cfg.blobs_max);
    for (std::uint32_t y = 0; y < cfg.image_height; ++y) {
      for (std::uint32_t x = 0; x < cfg.image_width; ++x) {
        const std::size_t p = (y * cfg.grid_rows / cfg.image_height) * cfg.grid_cols +
                              x * cfg.grid_cols / cfg.image_width;
        const auto kind = cfg.kind_of(t.patch_component[p]);
        const auto inst = t.instances.at(y, x);
        const auto cls = t.tri_class.at(y, x);
        if (inst == 0) {
          EXPECT_EQ(cls, pasta::kBackground);
          EXPECT_EQ(kind, ComponentKind::kBackground);
        } else {
          const auto& blob = t.blobs[inst - 1];
          EXPECT_EQ(cls, blob.anomaly ? pasta::kAnomaly : pasta::kTarget);
          EXPECT_EQ(t.patch_component[p], blob.component);
          EXPECT_EQ(kind, blob.anomaly ? ComponentKind::kAnomaly : ComponentKind::kTarget);
        }
      }
    }
  }
}

TEST(GenerateScene, BlobsDoNotOverlap) {
  auto cfg = small_config();
  cfg.blobs_min = 3;
  cfg.blobs_max = 5;
  const auto set = pasta::generate_component_means(cfg);
  for (std::uint32_t i = 0; i < 20; ++i) {
    auto rng = pasta::scene_rng(cfg, CorpusRole::kMixed, i);
    const auto scene = pasta::generate_scene(cfg, set, rng, true);
    std::vector<int> cover(cfg.grid_rows * cfg.grid_cols, 0);
    for (const auto& b : scene.truth.blobs) {
      for (auto r = b.row; r < b.row + b.rows; ++r) {
        for (auto c = b.col; c < b.col + b.cols; ++c) ++cover[r * cfg.grid_cols + c];
      }
    }
    for (int v : cover) EXPECT_LE(v, 1);
  }
}

TEST(GenerateScene, OvercrowdedGridFails) {
  auto cfg = small_config();
  cfg.blobs_min = cfg.blobs_max = 5;
  cfg.blob_size_min = cfg.blob_size_max = 8;
  const auto set = pasta::generate_component_means(cfg);
  auto rng = pasta::scene_rng(cfg, CorpusRole::kMixed, 0);
  EXPECT_PASTA_ERROR(pasta::generate_scene(cfg, set, rng, true), ErrorCode::kPlacementFailure);
}

TEST(GenerateCorpus, WritesLoadableFilesAndIsDeterministic) {
  testing_util::TempDir a, b;
  auto cfg = small_config();
  cfg.lambda = 0.5;
  const auto pa = pasta::generate_corpus(cfg, a.path());
  pasta::generate_corpus(cfg, b.path());

  const auto mixed = pasta::read_manifest(pa.mixed);
  const auto reference = pasta::read_manifest(pa.reference);
  const auto test = pasta::read_manifest(pa.test);
  EXPECT_EQ(mixed.size(), cfg.images_mixed);
  EXPECT_EQ(reference.size(), cfg.images_reference);
  EXPECT_EQ(test.size(), cfg.images_test);
  EXPECT_EQ(mixed.dim, cfg.dim);

  for (const auto& rec : reference.records) {
    const auto gt = pasta::read_label_raster(*rec.ground_truth, pasta::RasterKind::kTriClass);
    for (auto v : gt.values) EXPECT_NE(v, pasta::kAnomaly);
  }

  for (const auto* rel : {"mixed.tsv", "reference.tsv", "test.tsv", "truth.csv",
                          "mixed/img_00000.pfv", "test/img_00002_gt.pgm",
                          "reference/img_00003_inst.pgm"}) {
    EXPECT_EQ(testing_util::read_bytes(a / rel), testing_util::read_bytes(b / rel)) << rel;
  }
}

TEST(GenerateCorpus, SeedChangesOutput) {
  auto cfg = small_config();
  const auto m0 = pasta::generate_component_means(cfg);
  cfg.seed += 1;
  const auto m1 = pasta::generate_component_means(cfg);
  EXPECT_NE(m0.means, m1.means);
}

}  // namespace
