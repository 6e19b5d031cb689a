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

// Hypersphere / feature-voting baseline. Object embeddings are ranked by the
// radius to their k-th nearest neighbour; the densest fraction forms a bag of
// nominal hyperspheres, and queries are accepted when enough of their
// nearest bag entries contain them.

#ifndef PASTA_BASELINE_HPP
#define PASTA_BASELINE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "pasta/segmentation.hpp"
#include "pasta/tensor_io.hpp"

namespace pasta {

struct BaselineConfig {
  std::uint32_t k_sphere = 260;
  std::uint32_t k_vote = 10;
  double bag_fraction = 0.9;
};

// Owning row-major set of double-precision embeddings.
struct EmbeddingSet {
  std::size_t dim = 0;
  std::vector<double> data;

  std::size_t size() const { return dim == 0 ? 0 : data.size() / dim; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * dim, dim}; }
  void append(std::span<const double> v) { data.insert(data.end(), v.begin(), v.end()); }
};

struct FeatureBag {
  std::uint32_t dim = 0;
  std::uint32_t k_sphere = 0;
  EmbeddingSet embeddings;
  std::vector<double> radii;
  // Position of each retained entry in the list the bag was built from.
  std::vector<std::uint64_t> source_index;

  std::size_t size() const { return radii.size(); }
  bool operator==(const FeatureBag& o) const {
    return dim == o.dim && k_sphere == o.k_sphere && embeddings.data == o.embeddings.data &&
           radii == o.radii && source_index == o.source_index;
  }
};

enum class ObjectClass : std::uint8_t { kTarget, kAnomaly };

// Mean of the patch vectors under the mask, each weighted by how many mask
// pixels fall in its upsampled footprint.
std::vector<double> pool_object_embedding(const FeatureGrid& grid, const BinaryMask& mask,
                                          std::uint32_t height, std::uint32_t width);

// Euclidean distance from every embedding to its k-th nearest neighbour,
// excluding itself.
std::vector<double> knn_radii(const EmbeddingSet& embeddings, std::uint32_t k);

FeatureBag build_bag(const EmbeddingSet& embeddings, const BaselineConfig& cfg);

ObjectClass classify_embedding(const FeatureBag& bag, std::span<const double> query,
                               std::uint32_t k_vote);

SegmentationResult baseline_segment(const FeatureGrid& grid, const InstanceMaskSet& masks,
                                    const FeatureBag& bag, const BaselineConfig& cfg,
                                    std::uint32_t height, std::uint32_t width);

}  // namespace pasta

#endif  // PASTA_BASELINE_HPP
