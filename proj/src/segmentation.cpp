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

#include <algorithm>
#include <map>
#include <string>

#include "pasta/error.hpp"

namespace pasta {

InstanceMaskSet InstanceMaskSet::from_raster(const LabelRaster& instances) {
  InstanceMaskSet set;
  set.height = instances.height;
  set.width = instances.width;
  std::map<std::uint32_t, std::vector<std::uint32_t>> by_id;
  for (std::size_t i = 0; i < instances.values.size(); ++i) {
    const std::uint16_t id = instances.values[i];
    if (id != 0) by_id[id].push_back(static_cast<std::uint32_t>(i));
  }
  for (auto& [id, pixels] : by_id) {
    set.ids.push_back(id);
    set.masks.push_back({instances.height, instances.width, std::move(pixels)});
  }
  return set;
}

InstanceMaskSet InstanceMaskSet::from_binary(
    std::uint32_t height, std::uint32_t width,
    const std::vector<std::vector<std::uint8_t>>& masks) {
  InstanceMaskSet set;
  set.height = height;
  set.width = width;
  const std::size_t n = static_cast<std::size_t>(height) * width;
  for (std::size_t m = 0; m < masks.size(); ++m) {
    if (masks[m].size() != n) {
      fail(ErrorCode::kDimMismatch, "mask " + std::to_string(m + 1) + " has wrong size");
    }
    BinaryMask mask{height, width, {}};
    for (std::size_t i = 0; i < n; ++i) {
      if (masks[m][i]) mask.pixels.push_back(static_cast<std::uint32_t>(i));
    }
    if (mask.pixels.empty()) {
      warn("dropping empty instance mask " + std::to_string(m + 1));
      continue;
    }
    set.ids.push_back(static_cast<std::uint32_t>(m + 1));
    set.masks.push_back(std::move(mask));
  }
  return set;
}

template <typename T>
std::vector<T> upsample_nearest(std::span<const T> cells, std::uint32_t rows,
                                std::uint32_t cols, std::uint32_t height,
                                std::uint32_t width) {
  if (rows == 0 || cols == 0 || cells.size() != static_cast<std::size_t>(rows) * cols) {
    fail(ErrorCode::kBadDims, "patch map dimensions do not match its cells");
  }
  if (height < rows || width < cols) {
    fail(ErrorCode::kBadDims, "target raster is smaller than the patch map");
  }
  std::vector<std::uint32_t> col_of(width);
  for (std::uint64_t x = 0; x < width; ++x) {
    col_of[x] = static_cast<std::uint32_t>(x * cols / width);
  }
  std::vector<T> out(static_cast<std::size_t>(height) * width);
  for (std::uint64_t y = 0; y < height; ++y) {
    const std::size_t src = static_cast<std::size_t>(y * rows / height) * cols;
    T* dst = out.data() + y * width;
    for (std::uint32_t x = 0; x < width; ++x) dst[x] = cells[src + col_of[x]];
  }
  return out;
}

template std::vector<std::uint8_t> upsample_nearest(std::span<const std::uint8_t>, std::uint32_t,
                                                    std::uint32_t, std::uint32_t, std::uint32_t);
template std::vector<std::uint16_t> upsample_nearest(std::span<const std::uint16_t>,
                                                     std::uint32_t, std::uint32_t, std::uint32_t,
                                                     std::uint32_t);
template std::vector<std::uint32_t> upsample_nearest(std::span<const std::uint32_t>,
                                                     std::uint32_t, std::uint32_t, std::uint32_t,
                                                     std::uint32_t);

ClusterRaster upsample_nearest(const PatchLabelMap& map, std::uint32_t height,
                               std::uint32_t width) {
  return {height, width,
          upsample_nearest<std::uint32_t>(map.cells, map.rows, map.cols, height, width)};
}

BinaryAnomalyPatchMap infer_patch_anomaly(const PastaModel& model, const FeatureGrid& grid) {
  const PatchLabelMap clusters = assign_grid(model.codebook, grid);
  const auto member = model.anomalies.membership();
  BinaryAnomalyPatchMap out{clusters.rows, clusters.cols,
                            std::vector<std::uint8_t>(clusters.cells.size())};
  for (std::size_t i = 0; i < out.cells.size(); ++i) out.cells[i] = member[clusters.cells[i]];
  return out;
}

TriClassMask patch_prediction(const BinaryAnomalyPatchMap& map, std::uint32_t height,
                              std::uint32_t width) {
  const auto up = upsample_nearest<std::uint8_t>(map.cells, map.rows, map.cols, height, width);
  TriClassMask mask(height, width, RasterKind::kTriClass);
  for (std::size_t i = 0; i < up.size(); ++i) mask.values[i] = up[i] ? kAnomaly : kBackground;
  return mask;
}

double anomaly_fraction(const BinaryMask& mask, const ClusterRaster& clusters,
                        std::span<const std::uint8_t> anomaly_membership) {
  if (mask.pixels.empty()) fail(ErrorCode::kEmptyMask, "anomaly fraction of an empty mask");
  if (mask.height != clusters.height || mask.width != clusters.width) {
    fail(ErrorCode::kDimMismatch, "mask and cluster raster dimensions differ");
  }
  std::uint64_t hits = 0;
  for (auto p : mask.pixels) {
    const std::uint32_t c = clusters.values[p];
    if (c < anomaly_membership.size() && anomaly_membership[c]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(mask.pixels.size());
}

double anomaly_fraction(const BinaryMask& mask, const ClusterRaster& clusters,
                        const AnomalyClusterSet& anomalies) {
  return anomaly_fraction(mask, clusters, anomalies.membership());
}

TriClassMask paint_masks(const InstanceMaskSet& masks,
                         std::span<const MaskDecision> decisions) {
  if (decisions.size() != masks.size()) {
    fail(ErrorCode::kInternal, "one decision per mask expected");
  }
  TriClassMask out(masks.height, masks.width, RasterKind::kTriClass);
  for (std::size_t m = 0; m < masks.size(); ++m) {
    const std::uint16_t label = decisions[m].label;
    for (auto p : masks.masks[m].pixels) out.values[p] = std::max(out.values[p], label);
  }
  return out;
}

SegmentationResult fuse_masks(const PastaModel& model, const FeatureGrid& grid,
                              const InstanceMaskSet& masks, std::uint32_t height,
                              std::uint32_t width) {
  if (masks.height != height || masks.width != width) {
    fail(ErrorCode::kDimMismatch, "instance masks do not match the image dimensions");
  }
  const ClusterRaster clusters =
      upsample_nearest(assign_grid(model.codebook, grid), height, width);
  const auto member = model.anomalies.membership();
  SegmentationResult result;
  for (std::size_t m = 0; m < masks.size(); ++m) {
    MaskDecision d;
    d.mask_id = masks.ids.empty() ? static_cast<std::uint32_t>(m + 1) : masks.ids[m];
    d.area = masks.masks[m].area();
    d.anomaly_fraction = anomaly_fraction(masks.masks[m], clusters, member);
    d.label = d.anomaly_fraction > model.gamma ? kAnomaly : kTarget;
    result.decisions.push_back(d);
  }
  result.mask = paint_masks(masks, result.decisions);
  return result;
}

}  // namespace pasta
