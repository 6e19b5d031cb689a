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

#include "pasta/segmentation.hpp"

#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "test_util.hpp"

namespace {

using pasta::BinaryMask;
using pasta::ErrorCode;
using pasta::InstanceMaskSet;
using pasta::LabelRaster;
using pasta::RasterKind;

// 1-D codebook with centroids 0, 10, 20, ... and the given anomaly clusters.
pasta::PastaModel line_model(std::uint32_t k, std::vector<std::uint32_t> anomalies,
                             double gamma) {
  pasta::PastaModel m;
  m.codebook.k = k;
  m.codebook.dim = 1;
  for (std::uint32_t i = 0; i < k; ++i) m.codebook.centroids.push_back(10.0 * i);
  m.codebook.counts.assign(k, 1);
  m.mixed = pasta::ClusterDistribution::from_counts(std::vector<std::uint64_t>(k, 1));
  m.reference = m.mixed;
  m.anomalies.ratios.assign(k, 1.0);
  for (auto a : anomalies) m.anomalies.ratios[a] = 0.0;
  m.anomalies.ids = std::move(anomalies);
  m.gamma = gamma;
  return m;
}

pasta::FeatureGrid grid_of(std::uint32_t rows, std::uint32_t cols, std::vector<float> v) {
  pasta::FeatureGrid g;
  g.rows = rows;
  g.cols = cols;
  g.dim = 1;
  g.data = std::move(v);
  return g;
}

TEST(UpsampleNearest, BlocksForDivisibleSizes) {
  const std::vector<std::uint16_t> cells = {1, 2, 3, 4};
  const auto up = pasta::upsample_nearest<std::uint16_t>(cells, 2, 2, 4, 4);
  const std::vector<std::uint16_t> expected = {1, 1, 2, 2, 1, 1, 2, 2,
                                               3, 3, 4, 4, 3, 3, 4, 4};
  EXPECT_EQ(up, expected);
  EXPECT_EQ(pasta::upsample_nearest<std::uint16_t>(cells, 2, 2, 2, 2), cells);
}

TEST(UpsampleNearest, MatchesFloorFormula) {
  std::mt19937_64 gen(13);
  std::vector<std::uint32_t> cells(9);
  for (auto& c : cells) c = static_cast<std::uint32_t>(gen() % 50);
  EXPECT_EQ(pasta::upsample_nearest<std::uint32_t>(cells, 3, 3, 7, 5),
            oracle::upsample(cells, 3, 3, 7, 5));
  std::vector<std::uint8_t> wide(13 * 29);
  for (auto& c : wide) c = static_cast<std::uint8_t>(gen() % 2);
  EXPECT_EQ(pasta::upsample_nearest<std::uint8_t>(wide, 13, 29, 512, 910),
            oracle::upsample(wide, 13, 29, 512, 910));
}

TEST(UpsampleNearest, OutputValuesComeFromInput) {
  const std::vector<std::uint16_t> cells = {5, 9, 11};
  for (auto v : pasta::upsample_nearest<std::uint16_t>(cells, 1, 3, 4, 10)) {
    EXPECT_NE(std::find(cells.begin(), cells.end(), v), cells.end());
  }
}

TEST(UpsampleNearest, RejectsShrinking) {
  const std::vector<std::uint8_t> cells(6, 0);
  EXPECT_PASTA_ERROR(pasta::upsample_nearest<std::uint8_t>(cells, 2, 3, 1, 3), ErrorCode::kBadDims);
  EXPECT_PASTA_ERROR(pasta::upsample_nearest<std::uint8_t>(cells, 2, 3, 2, 2), ErrorCode::kBadDims);
}

TEST(InferPatchAnomaly, FollowsMembership) {
  const auto g = grid_of(2, 3, {0, 10, 20, 21, 9, 1});
  EXPECT_EQ(pasta::infer_patch_anomaly(line_model(3, {}, 0.1), g).cells,
            (std::vector<std::uint8_t>(6, 0)));
  EXPECT_EQ(pasta::infer_patch_anomaly(line_model(3, {2}, 0.1), g).cells,
            (std::vector<std::uint8_t>{0, 0, 1, 1, 0, 0}));
  const auto at_anomaly = grid_of(1, 2, {20, 20});
  EXPECT_EQ(pasta::infer_patch_anomaly(line_model(3, {2}, 0.1), at_anomaly).cells,
            (std::vector<std::uint8_t>{1, 1}));
  pasta::FeatureGrid wrong = g;
  wrong.dim = 2;
  wrong.rows = 1;
  EXPECT_PASTA_ERROR(pasta::infer_patch_anomaly(line_model(3, {2}, 0.1), wrong),
                     ErrorCode::kDimMismatch);
}

TEST(PatchPrediction, OnlyClassesZeroAndTwo) {
  pasta::BinaryAnomalyPatchMap map{2, 2, {1, 0, 0, 1}};
  const auto mask = pasta::patch_prediction(map, 5, 3);
  for (auto v : mask.values) EXPECT_TRUE(v == 0 || v == 2);
  EXPECT_EQ(mask.at(0, 0), 2);
  EXPECT_EQ(mask.at(4, 2), 2);
  EXPECT_EQ(mask.at(0, 2), 0);
}

TEST(AnomalyFraction, Arithmetic) {
  pasta::ClusterRaster clusters{2, 5, {0, 0, 2, 2, 0, 1, 1, 1, 1, 1}};
  BinaryMask mask{2, 5, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}};
  const std::vector<std::uint8_t> member = {0, 0, 1};
  EXPECT_DOUBLE_EQ(pasta::anomaly_fraction(mask, clusters, member), 0.2);
  BinaryMask nominal{2, 5, {0, 1, 5}};
  EXPECT_EQ(pasta::anomaly_fraction(nominal, clusters, member), 0.0);
  EXPECT_PASTA_ERROR(pasta::anomaly_fraction(BinaryMask{2, 5, {}}, clusters, member),
                     ErrorCode::kEmptyMask);
  EXPECT_PASTA_ERROR(pasta::anomaly_fraction(BinaryMask{5, 2, {0}}, clusters, member),
                     ErrorCode::kDimMismatch);
}

TEST(AnomalyFraction, MatchesPixelCount) {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 30; ++trial) {
    const std::uint32_t h = 1 + gen() % 20, w = 1 + gen() % 20, k = 2 + gen() % 6;
    pasta::ClusterRaster clusters{h, w, std::vector<std::uint32_t>(h * w)};
    for (auto& c : clusters.values) c = static_cast<std::uint32_t>(gen() % k);
    std::vector<std::uint8_t> member(k);
    for (auto& m : member) m = gen() % 2;
    BinaryMask mask{h, w, {}};
    for (std::uint32_t p = 0; p < h * w; ++p) {
      if (gen() % 3 == 0) mask.pixels.push_back(p);
    }
    if (mask.pixels.empty()) mask.pixels.push_back(0);
    std::size_t hits = 0;
    for (std::uint32_t y = 0; y < h; ++y) {
      for (std::uint32_t x = 0; x < w; ++x) {
        const std::uint32_t p = y * w + x;
        const bool in = std::find(mask.pixels.begin(), mask.pixels.end(), p) != mask.pixels.end();
        if (in && member[clusters.values[p]]) ++hits;
      }
    }
    EXPECT_DOUBLE_EQ(pasta::anomaly_fraction(mask, clusters, member),
                     static_cast<double>(hits) / mask.pixels.size());
  }
}

TEST(InstanceMaskSet, FromRasterOrdersById) {
  LabelRaster inst(2, 3, RasterKind::kInstance);
  inst.values = {0, 7, 7, 3, 0, 3};
  const auto set = InstanceMaskSet::from_raster(inst);
  ASSERT_EQ(set.size(), 2u);
  EXPECT_EQ(set.ids, (std::vector<std::uint32_t>{3, 7}));
  EXPECT_EQ(set.masks[0].pixels, (std::vector<std::uint32_t>{3, 5}));
  EXPECT_EQ(set.masks[1].pixels, (std::vector<std::uint32_t>{1, 2}));
}

TEST(InstanceMaskSet, FromBinaryDropsEmptyMasks) {
  pasta::set_warnings_enabled(false);
  const auto set = InstanceMaskSet::from_binary(1, 3, {{1, 0, 0}, {0, 0, 0}, {0, 1, 1}});
  pasta::set_warnings_enabled(true);
  ASSERT_EQ(set.size(), 2u);
  EXPECT_EQ(set.ids, (std::vector<std::uint32_t>{1, 3}));
  EXPECT_PASTA_ERROR(InstanceMaskSet::from_binary(1, 3, {{1, 0}}), ErrorCode::kDimMismatch);
}

class FuseMasks : public ::testing::Test {
 protected:
  // 1x10 grid on a 1x10 image: cells 0..1 anomalous (cluster 2), rest cluster 1.
  pasta::FeatureGrid grid = grid_of(1, 10, {20, 20, 10, 10, 10, 10, 10, 10, 10, 10});
};

TEST_F(FuseMasks, NoMasksGiveBackground) {
  InstanceMaskSet none{1, 10, {}, {}};
  const auto r = pasta::fuse_masks(line_model(3, {2}, 0.1), grid, none, 1, 10);
  EXPECT_EQ(r.mask.values, std::vector<std::uint16_t>(10, 0));
  EXPECT_TRUE(r.decisions.empty());
}

TEST_F(FuseMasks, FractionAboveGammaPaintsWholeMask) {
  InstanceMaskSet set{1, 10, {BinaryMask{1, 10, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}}}, {1}};
  const auto r = pasta::fuse_masks(line_model(3, {2}, 0.1), grid, set, 1, 10);
  ASSERT_EQ(r.decisions.size(), 1u);
  EXPECT_DOUBLE_EQ(r.decisions[0].anomaly_fraction, 0.2);
  EXPECT_EQ(r.decisions[0].label, pasta::kAnomaly);
  EXPECT_EQ(r.mask.values, std::vector<std::uint16_t>(10, 2));
}

TEST_F(FuseMasks, FractionEqualToGammaIsTarget) {
  // 1 of 10 pixels anomalous: fraction exactly 1/10.
  InstanceMaskSet set{1, 10, {BinaryMask{1, 10, {1, 2, 3, 4, 5, 6, 7, 8, 9}}}, {1}};
  const auto nine = pasta::fuse_masks(line_model(3, {2}, 1.0 / 9.0), grid, set, 1, 10);
  EXPECT_EQ(nine.decisions[0].label, pasta::kTarget);
  const auto grid10 = grid_of(1, 10, {20, 10, 10, 10, 10, 10, 10, 10, 10, 10});
  InstanceMaskSet all{1, 10, {BinaryMask{1, 10, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}}}, {1}};
  EXPECT_EQ(pasta::fuse_masks(line_model(3, {2}, 0.1), grid10, all, 1, 10).decisions[0].label,
            pasta::kTarget);
  EXPECT_EQ(pasta::fuse_masks(line_model(3, {2}, 0.09), grid10, all, 1, 10).decisions[0].label,
            pasta::kAnomaly);
}

TEST_F(FuseMasks, OverlapResolvesToAnomaly) {
  InstanceMaskSet set{1, 10,
                      {BinaryMask{1, 10, {0, 1, 2}}, BinaryMask{1, 10, {2, 3, 4, 5}}},
                      {1, 2}};
  const auto r = pasta::fuse_masks(line_model(3, {2}, 0.1), grid, set, 1, 10);
  EXPECT_EQ(r.decisions[0].label, pasta::kAnomaly);
  EXPECT_EQ(r.decisions[1].label, pasta::kTarget);
  const std::vector<std::uint16_t> expected = {2, 2, 2, 1, 1, 1, 0, 0, 0, 0};
  EXPECT_EQ(r.mask.values, expected);
}

TEST_F(FuseMasks, GammaMonotone) {
  std::mt19937_64 gen(31);
  pasta::FeatureGrid g = grid_of(4, 4, std::vector<float>(16));
  for (auto& v : g.data) v = (gen() % 3 == 0) ? 20.0f : 10.0f;
  InstanceMaskSet set{8, 8, {}, {}};
  for (std::uint32_t m = 0; m < 6; ++m) {
    BinaryMask mask{8, 8, {}};
    for (std::uint32_t p = 0; p < 64; ++p) {
      if (gen() % 4 == 0) mask.pixels.push_back(p);
    }
    if (mask.pixels.empty()) mask.pixels.push_back(m);
    set.masks.push_back(mask);
    set.ids.push_back(m + 1);
  }
  std::vector<std::uint16_t> previous(6, pasta::kAnomaly);
  for (int i = 0; i <= 20; ++i) {
    const auto r = pasta::fuse_masks(line_model(3, {2}, i * 0.05), g, set, 8, 8);
    for (std::size_t m = 0; m < 6; ++m) {
      if (previous[m] == pasta::kTarget) EXPECT_EQ(r.decisions[m].label, pasta::kTarget);
      previous[m] = r.decisions[m].label;
    }
  }
}

TEST_F(FuseMasks, DimMismatch) {
  InstanceMaskSet set{2, 10, {}, {}};
  EXPECT_PASTA_ERROR(pasta::fuse_masks(line_model(3, {2}, 0.1), grid, set, 1, 10),
                     ErrorCode::kDimMismatch);
}

}  // namespace
