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

#ifndef PASTA_DISTRIBUTION_HPP
#define PASTA_DISTRIBUTION_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pasta/clustering.hpp"
#include "pasta/tensor_io.hpp"

namespace pasta {

inline constexpr double kDefaultRatioThreshold = 0.05;
inline constexpr double kDefaultGamma = 0.1;

// Patch-count weighted cluster frequencies over a corpus.
struct ClusterDistribution {
  std::vector<std::uint64_t> counts;
  std::vector<double> probs;
  std::uint64_t total = 0;

  std::size_t k() const { return counts.size(); }

  static ClusterDistribution from_counts(std::vector<std::uint64_t> counts);
  bool operator==(const ClusterDistribution&) const = default;
};

// Reference-to-mixed probability ratio per cluster. nullopt where the mixed
// corpus has no mass in the cluster.
using ClusterRatios = std::vector<std::optional<double>>;

struct AnomalyClusterSet {
  std::vector<std::uint32_t> ids;  // ascending
  ClusterRatios ratios;
  double threshold = kDefaultRatioThreshold;

  bool contains(std::uint32_t cluster) const;
  // Per-cluster 0/1 lookup table of length ratios.size().
  std::vector<std::uint8_t> membership() const;

  bool operator==(const AnomalyClusterSet&) const = default;
};

struct PastaModel {
  ClusterCodebook codebook;
  ClusterDistribution mixed;
  ClusterDistribution reference;
  AnomalyClusterSet anomalies;
  double gamma = kDefaultGamma;

  std::uint32_t k() const { return codebook.k; }
  // Throws kKMismatch or kInvalidArgument.
  void validate() const;

  bool operator==(const PastaModel&) const = default;
};

ClusterDistribution estimate_distribution(const ClusterCodebook& codebook,
                                          std::span<const FeatureGrid> grids);
ClusterDistribution estimate_distribution(const ClusterCodebook& codebook,
                                          const DatasetManifest& manifest);

ClusterRatios compute_ratios(const ClusterDistribution& reference,
                             const ClusterDistribution& mixed);

// Cluster i is anomalous iff its ratio is defined and strictly below the
// threshold.
AnomalyClusterSet define_anomaly_set(const ClusterRatios& ratios, double threshold);

PastaModel build_model(ClusterCodebook codebook, const ClusterDistribution& mixed,
                       const ClusterDistribution& reference, double ratio_threshold,
                       double gamma);
PastaModel build_model(ClusterCodebook codebook, const DatasetManifest& mixed,
                       const DatasetManifest& reference,
                       double ratio_threshold = kDefaultRatioThreshold,
                       double gamma = kDefaultGamma);

}  // namespace pasta

#endif  // PASTA_DISTRIBUTION_HPP
