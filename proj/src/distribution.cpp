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

#include "pasta/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pasta/error.hpp"
#include "pasta/parallel.hpp"

namespace pasta {

ClusterDistribution ClusterDistribution::from_counts(std::vector<std::uint64_t> counts) {
  ClusterDistribution d;
  d.counts = std::move(counts);
  for (auto c : d.counts) d.total += c;
  d.probs.resize(d.counts.size(), 0.0);
  if (d.total > 0) {
    for (std::size_t i = 0; i < d.counts.size(); ++i) {
      d.probs[i] = static_cast<double>(d.counts[i]) / static_cast<double>(d.total);
    }
  }
  return d;
}

bool AnomalyClusterSet::contains(std::uint32_t cluster) const {
  return std::binary_search(ids.begin(), ids.end(), cluster);
}

std::vector<std::uint8_t> AnomalyClusterSet::membership() const {
  std::vector<std::uint8_t> table(ratios.size(), 0);
  for (auto id : ids) {
    if (id < table.size()) table[id] = 1;
  }
  return table;
}

void PastaModel::validate() const {
  const std::size_t k = codebook.k;
  if (mixed.k() != k || reference.k() != k || anomalies.ratios.size() != k ||
      codebook.counts.size() != k || codebook.centroids.size() != k * codebook.dim) {
    fail(ErrorCode::kKMismatch, "model components disagree on the cluster count");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "gamma must lie in [0, 1]");
  }
  for (auto id : anomalies.ids) {
    if (id >= k) fail(ErrorCode::kKMismatch, "anomaly cluster id out of range");
  }
}

ClusterDistribution estimate_distribution(const ClusterCodebook& codebook,
                                          std::span<const FeatureGrid> grids) {
  if (grids.empty()) fail(ErrorCode::kEmptyManifest, "no grids to tally");
  std::vector<std::vector<std::uint64_t>> per_image(grids.size());
  parallel_for(grids.size(), [&](std::size_t i) {
    const PatchLabelMap map = assign_grid(codebook, grids[i]);
    per_image[i].assign(codebook.k, 0);
    for (auto c : map.cells) ++per_image[i][c];
  });
  std::vector<std::uint64_t> counts(codebook.k, 0);
  for (const auto& t : per_image) {
    for (std::size_t c = 0; c < counts.size(); ++c) counts[c] += t[c];
  }
  return ClusterDistribution::from_counts(std::move(counts));
}

ClusterDistribution estimate_distribution(const ClusterCodebook& codebook,
                                          const DatasetManifest& manifest) {
  if (manifest.records.empty()) fail(ErrorCode::kEmptyManifest, "manifest lists no images");
  if (manifest.dim != codebook.dim) {
    fail(ErrorCode::kDimMismatch, "manifest dim " + std::to_string(manifest.dim) +
                                      " differs from codebook dim " +
                                      std::to_string(codebook.dim));
  }
  std::vector<std::vector<std::uint64_t>> per_image(manifest.size());
  parallel_for(manifest.size(), [&](std::size_t i) {
    const FeatureGrid grid = read_feature_grid(manifest.records[i].features);
    const PatchLabelMap map = assign_grid(codebook, grid);
    per_image[i].assign(codebook.k, 0);
    for (auto c : map.cells) ++per_image[i][c];
  });
  std::vector<std::uint64_t> counts(codebook.k, 0);
  for (const auto& t : per_image) {
    for (std::size_t c = 0; c < counts.size(); ++c) counts[c] += t[c];
  }
  return ClusterDistribution::from_counts(std::move(counts));
}

ClusterRatios compute_ratios(const ClusterDistribution& reference,
                             const ClusterDistribution& mixed) {
  if (reference.k() != mixed.k()) {
    fail(ErrorCode::kKMismatch, "distributions have different cluster counts");
  }
  ClusterRatios ratios(mixed.k());
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (mixed.probs[i] > 0.0) ratios[i] = reference.probs[i] / mixed.probs[i];
  }
  return ratios;
}

AnomalyClusterSet define_anomaly_set(const ClusterRatios& ratios, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "ratio threshold must lie in [0, 1]");
  }
  AnomalyClusterSet set;
  set.ratios = ratios;
  set.threshold = threshold;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (ratios[i] && *ratios[i] < threshold) set.ids.push_back(static_cast<std::uint32_t>(i));
  }
  return set;
}

PastaModel build_model(ClusterCodebook codebook, const ClusterDistribution& mixed,
                       const ClusterDistribution& reference, double ratio_threshold,
                       double gamma) {
  PastaModel model;
  model.codebook = std::move(codebook);
  model.mixed = mixed;
  model.reference = reference;
  model.anomalies = define_anomaly_set(compute_ratios(reference, mixed), ratio_threshold);
  model.gamma = gamma;
  model.validate();
  for (std::size_t i = 0; i < model.anomalies.ratios.size(); ++i) {
    if (!model.anomalies.ratios[i]) {
      warn("cluster " + std::to_string(i) +
           " has no mixed-corpus mass; its ratio is undefined and it is treated as nominal");
    }
  }
  return model;
}

PastaModel build_model(ClusterCodebook codebook, const DatasetManifest& mixed,
                       const DatasetManifest& reference, double ratio_threshold,
                       double gamma) {
  const ClusterDistribution mixed_dist = estimate_distribution(codebook, mixed);
  const ClusterDistribution ref_dist = estimate_distribution(codebook, reference);
  return build_model(std::move(codebook), mixed_dist, ref_dist, ratio_threshold, gamma);
}

}  // namespace pasta
