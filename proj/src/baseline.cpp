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

#include "pasta/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pasta/error.hpp"
#include "pasta/parallel.hpp"

namespace pasta {
namespace {

double euclidean(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace

std::vector<double> pool_object_embedding(const FeatureGrid& grid, const BinaryMask& mask,
                                          std::uint32_t height, std::uint32_t width) {
  if (mask.pixels.empty()) fail(ErrorCode::kEmptyMask, "cannot pool an empty mask");
  if (mask.height != height || mask.width != width) {
    fail(ErrorCode::kDimMismatch, "mask does not match the image dimensions");
  }
  if (height < grid.rows || width < grid.cols) {
    fail(ErrorCode::kBadDims, "image is smaller than its patch grid");
  }
  std::vector<std::uint64_t> weight(grid.patch_count(), 0);
  for (auto p : mask.pixels) {
    const std::uint64_t y = p / width;
    const std::uint64_t x = p % width;
    const std::size_t cell = static_cast<std::size_t>(y * grid.rows / height) * grid.cols +
                             static_cast<std::size_t>(x * grid.cols / width);
    ++weight[cell];
  }
  std::vector<double> out(grid.dim, 0.0);
  for (std::size_t cell = 0; cell < weight.size(); ++cell) {
    if (weight[cell] == 0) continue;
    const auto v = grid.patch(cell);
    for (std::size_t j = 0; j < grid.dim; ++j) out[j] += static_cast<double>(weight[cell]) * v[j];
  }
  const double total = static_cast<double>(mask.pixels.size());
  for (auto& v : out) v /= total;
  return out;
}

std::vector<double> knn_radii(const EmbeddingSet& embeddings, std::uint32_t k) {
  const std::size_t n = embeddings.size();
  if (k < 1) fail(ErrorCode::kInvalidArgument, "k_sphere must be at least 1");
  if (n <= k) {
    fail(ErrorCode::kTooFewSamples, "need more than " + std::to_string(k) +
                                        " embeddings, got " + std::to_string(n));
  }
  std::vector<double> radii(n);
  parallel_for(n, [&](std::size_t i) {
    std::vector<double> d;
    d.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) d.push_back(euclidean(embeddings.row(i), embeddings.row(j)));
    }
    std::nth_element(d.begin(), d.begin() + (k - 1), d.end());
    radii[i] = d[k - 1];
  });
  return radii;
}

FeatureBag build_bag(const EmbeddingSet& embeddings, const BaselineConfig& cfg) {
  if (!(cfg.bag_fraction > 0.0 && cfg.bag_fraction <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "bag_fraction must lie in (0, 1]");
  }
  const std::vector<double> radii = knn_radii(embeddings, cfg.k_sphere);
  const std::size_t n = radii.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return radii[a] < radii[b]; });
  std::size_t keep = static_cast<std::size_t>(std::ceil(cfg.bag_fraction * n - 1e-9));
  keep = std::clamp<std::size_t>(keep, 1, n);
  order.resize(keep);
  std::sort(order.begin(), order.end());

  FeatureBag bag;
  bag.dim = static_cast<std::uint32_t>(embeddings.dim);
  bag.k_sphere = cfg.k_sphere;
  bag.embeddings.dim = embeddings.dim;
  for (auto i : order) {
    bag.embeddings.append(embeddings.row(i));
    bag.radii.push_back(radii[i]);
    bag.source_index.push_back(i);
  }
  return bag;
}

ObjectClass classify_embedding(const FeatureBag& bag, std::span<const double> query,
                               std::uint32_t k_vote) {
  if (k_vote < 1) fail(ErrorCode::kInvalidArgument, "k_vote must be at least 1");
  if (bag.size() < k_vote) {
    fail(ErrorCode::kBagTooSmall, "bag holds " + std::to_string(bag.size()) +
                                      " entries, k_vote is " + std::to_string(k_vote));
  }
  if (query.size() != bag.dim) fail(ErrorCode::kDimMismatch, "query dim differs from bag");
  std::vector<std::pair<double, std::size_t>> d(bag.size());
  for (std::size_t i = 0; i < bag.size(); ++i) {
    d[i] = {euclidean(query, bag.embeddings.row(i)), i};
  }
  std::partial_sort(d.begin(), d.begin() + k_vote, d.end());
  std::uint32_t votes = 0;
  for (std::uint32_t v = 0; v < k_vote; ++v) {
    if (d[v].first <= bag.radii[d[v].second]) ++votes;
  }
  return votes >= (k_vote + 1) / 2 ? ObjectClass::kTarget : ObjectClass::kAnomaly;
}

SegmentationResult baseline_segment(const FeatureGrid& grid, const InstanceMaskSet& masks,
                                    const FeatureBag& bag, const BaselineConfig& cfg,
                                    std::uint32_t height, std::uint32_t width) {
  if (masks.height != height || masks.width != width) {
    fail(ErrorCode::kDimMismatch, "instance masks do not match the image dimensions");
  }
  SegmentationResult result;
  for (std::size_t m = 0; m < masks.size(); ++m) {
    const auto embedding = pool_object_embedding(grid, masks.masks[m], height, width);
    MaskDecision d;
    d.mask_id = masks.ids.empty() ? static_cast<std::uint32_t>(m + 1) : masks.ids[m];
    d.area = masks.masks[m].area();
    d.label = classify_embedding(bag, embedding, cfg.k_vote) == ObjectClass::kAnomaly
                  ? kAnomaly
                  : kTarget;
    d.anomaly_fraction = d.label == kAnomaly ? 1.0 : 0.0;
    result.decisions.push_back(d);
  }
  result.mask = paint_masks(masks, result.decisions);
  return result;
}

}  // namespace pasta
