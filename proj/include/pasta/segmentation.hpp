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

#ifndef PASTA_SEGMENTATION_HPP
#define PASTA_SEGMENTATION_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "pasta/clustering.hpp"
#include "pasta/distribution.hpp"
#include "pasta/tensor_io.hpp"

namespace pasta {

struct BinaryAnomalyPatchMap {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint8_t> cells;  // 1 = anomaly

  bool operator==(const BinaryAnomalyPatchMap&) const = default;
};

// Per-pixel cluster ids at image resolution.
struct ClusterRaster {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<std::uint32_t> values;
};

// One instance mask, stored as ascending linear pixel indices.
struct BinaryMask {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<std::uint32_t> pixels;

  std::size_t area() const { return pixels.size(); }
};

struct InstanceMaskSet {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<BinaryMask> masks;
  std::vector<std::uint32_t> ids;  // parallel to masks

  std::size_t size() const { return masks.size(); }

  // One mask per instance id present in the raster, ascending by id.
  static InstanceMaskSet from_raster(const LabelRaster& instances);
  // Masks given as H*W 0/1 arrays; ids are 1-based positions. Empty masks
  // are dropped with a warning.
  static InstanceMaskSet from_binary(std::uint32_t height, std::uint32_t width,
                                     const std::vector<std::vector<std::uint8_t>>& masks);
};

// Pixel (y, x) takes cell (floor(y * rows / H), floor(x * cols / W)).
template <typename T>
std::vector<T> upsample_nearest(std::span<const T> cells, std::uint32_t rows,
                                std::uint32_t cols, std::uint32_t height,
                                std::uint32_t width);

ClusterRaster upsample_nearest(const PatchLabelMap& map, std::uint32_t height,
                               std::uint32_t width);

BinaryAnomalyPatchMap infer_patch_anomaly(const PastaModel& model, const FeatureGrid& grid);

// Evaluation-A prediction at image resolution: anomaly patches become class 2,
// everything else class 0.
TriClassMask patch_prediction(const BinaryAnomalyPatchMap& map, std::uint32_t height,
                              std::uint32_t width);

// Fraction of the mask's pixels lying over anomaly clusters.
double anomaly_fraction(const BinaryMask& mask, const ClusterRaster& clusters,
                        std::span<const std::uint8_t> anomaly_membership);
double anomaly_fraction(const BinaryMask& mask, const ClusterRaster& clusters,
                        const AnomalyClusterSet& anomalies);

struct MaskDecision {
  std::uint32_t mask_id = 0;
  std::uint64_t area = 0;
  double anomaly_fraction = 0.0;
  std::uint16_t label = kTarget;
};

struct SegmentationResult {
  TriClassMask mask;
  std::vector<MaskDecision> decisions;
};

// Paints each mask with its label. Overlaps resolve to the larger class so
// anomaly wins over target; uncovered pixels stay background.
TriClassMask paint_masks(const InstanceMaskSet& masks,
                         std::span<const MaskDecision> decisions);

// Labels each mask anomalous iff its anomaly fraction exceeds model.gamma.
SegmentationResult fuse_masks(const PastaModel& model, const FeatureGrid& grid,
                              const InstanceMaskSet& masks, std::uint32_t height,
                              std::uint32_t width);

}  // namespace pasta

#endif  // PASTA_SEGMENTATION_HPP
