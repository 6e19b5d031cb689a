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

#ifndef PASTA_CLUSTERING_HPP
#define PASTA_CLUSTERING_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "pasta/tensor_io.hpp"

namespace pasta {

// Non-owning row-major view over n vectors of `dim` floats.
struct FeatureView {
  std::span<const float> data;
  std::size_t dim = 0;

  std::size_t rows() const { return dim == 0 ? 0 : data.size() / dim; }
  std::span<const float> row(std::size_t i) const {
    return data.subspan(i * dim, dim);
  }
};

// Owning counterpart, typically the concatenated patches of a corpus.
struct FeatureMatrix {
  std::vector<float> data;
  std::size_t dim = 0;

  std::size_t rows() const { return dim == 0 ? 0 : data.size() / dim; }
  FeatureView view() const { return {data, dim}; }
  void append(std::span<const float> values) {
    data.insert(data.end(), values.begin(), values.end());
  }
};

// Concatenates every patch of every grid in the manifest, in record order.
FeatureMatrix gather_features(const DatasetManifest& manifest);

struct MiniBatchConfig {
  std::size_t batch_size = 4096;
  std::uint32_t max_epochs = 100;
  // Threshold on the mean squared centroid displacement over one epoch.
  double tol = 1e-6;
  // Capped at the sample count.
  std::size_t init_sample_size = 65536;
  std::uint64_t seed = 0;
};

struct ClusterCodebook {
  std::uint32_t k = 0;
  std::uint32_t dim = 0;
  std::vector<double> centroids;  // k * dim
  std::vector<std::uint64_t> counts;
  std::uint64_t seed = 0;
  // Mean squared distance of each epoch's samples to the centroid they were
  // assigned to within that epoch.
  std::vector<double> inertia_history;

  std::span<const double> centroid(std::size_t i) const {
    return {centroids.data() + i * dim, dim};
  }

  bool operator==(const ClusterCodebook&) const = default;
};

struct PatchLabelMap {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint32_t> cells;

  std::uint32_t at(std::size_t r, std::size_t c) const { return cells[r * cols + c]; }
  bool operator==(const PatchLabelMap&) const = default;
};

double squared_distance(std::span<const float> x, std::span<const double> c);

// k-means++ seeding over a uniform subsample of cfg.init_sample_size rows.
// Returns k * dim centroid coordinates.
std::vector<double> kmeans_plus_plus(FeatureView features, std::uint32_t k,
                                     const MiniBatchConfig& cfg);

// Seeds with kmeans_plus_plus and refines with mini-batch updates.
ClusterCodebook fit_codebook(FeatureView features, std::uint32_t k,
                             const MiniBatchConfig& cfg);

// Mini-batch refinement from caller-provided initial centroids.
ClusterCodebook fit_codebook_from(FeatureView features,
                                  std::vector<double> initial_centroids,
                                  std::uint32_t k, const MiniBatchConfig& cfg);

// Nearest centroid by squared Euclidean distance, smallest index on ties.
std::uint32_t assign(const ClusterCodebook& codebook, std::span<const float> vector);

PatchLabelMap assign_grid(const ClusterCodebook& codebook, const FeatureGrid& grid);

double inertia(const ClusterCodebook& codebook, FeatureView features);

}  // namespace pasta

#endif  // PASTA_CLUSTERING_HPP
